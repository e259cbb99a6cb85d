#ifndef BLOCKCS_H
#define BLOCKCS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum BcsStatus {
  BCS_STATUS_OK = 0,
  // File could not be read or written.
  BCS_STATUS_IO = 1,
  // Invalid parameter or a construction outside its domain.
  BCS_STATUS_PARAM = 2,
  // Malformed matrix file or matrix data.
  BCS_STATUS_MALFORMED = 3,
  // A recomputed property disagrees with the declared one.
  BCS_STATUS_VERIFY = 4,
  // A required pointer argument was null.
  BCS_STATUS_NULL = -1,
  // The library panicked; the handle arguments are left untouched.
  BCS_STATUS_PANIC = -2,
} BcsStatus;

// Opaque matrix handle.
typedef struct BcsMatrix BcsMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
const char *bcs_last_error(void);

// Polynomial-graph matrix of size `p^2 x p^(r+1)`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BcsStatus bcs_devore(uint32_t p, uint32_t r, struct BcsMatrix **out);

// Composes two block binary matrices keeping `k` blocks.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum BcsStatus bcs_compose(const struct BcsMatrix *a,
                           const struct BcsMatrix *b,
                           uint32_t k,
                           struct BcsMatrix **out);

// Plans and builds a binary matrix with exactly `rows` rows, using degree
// bound `r` for every base matrix.
//
// # Safety
// `out` must be writable.
enum BcsStatus bcs_plan_execute(uint64_t rows, uint32_t r, struct BcsMatrix **out);

// Ternary matrix with the sign of each one set by its block position.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum BcsStatus bcs_sign_flip(const struct BcsMatrix *m, struct BcsMatrix **out);

// Replaces each column's ones by Hadamard rows of order `k + r_prime`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum BcsStatus bcs_hadamard_expand(const struct BcsMatrix *m,
                                   uint32_t r_prime,
                                   struct BcsMatrix **out);

// Row count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t bcs_matrix_rows(const struct BcsMatrix *m);

// Column count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t bcs_matrix_cols(const struct BcsMatrix *m);

// Number of nonzero entries, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t bcs_matrix_nnz(const struct BcsMatrix *m);

// Nonzeros of 0-based column `j` as 1-based row indices and values.
//
// `*len` always receives the column weight. With null `rows` and `values`
// nothing else is written; otherwise both must hold `capacity` elements
// and `capacity` must be at least the weight.
//
// # Safety
// `m` must be a live handle, `len` writable, and `rows`/`values` null or
// valid for `capacity` writes.
enum BcsStatus bcs_matrix_column(const struct BcsMatrix *m,
                                 size_t j,
                                 uint32_t *rows,
                                 int8_t *values,
                                 size_t capacity,
                                 size_t *len);

// Largest `|<a_i, a_j>|` over distinct columns, by brute force.
//
// # Safety
// `m` must be a live handle; `out` writable.
enum BcsStatus bcs_max_overlap(const struct BcsMatrix *m, uint64_t *out);

// Exact mutual coherence as `num / den`.
//
// # Safety
// `m` must be a live handle; `num` and `den` writable.
enum BcsStatus bcs_coherence(const struct BcsMatrix *m, uint64_t *num, uint64_t *den);

// Exact density (nonzeros over entries) as `num / den`.
//
// # Safety
// `m` must be a live handle; `num` and `den` writable.
enum BcsStatus bcs_density(const struct BcsMatrix *m, uint64_t *num, uint64_t *den);

// Reads `path` and its `.meta.json` sidecar.
//
// # Safety
// `path` must be a NUL-terminated string; `out` writable.
enum BcsStatus bcs_matrix_read(const char *path, struct BcsMatrix **out);

// Writes the Matrix Market payload to `path` and metadata beside it.
//
// # Safety
// `m` must be a live handle; `path` a NUL-terminated string.
enum BcsStatus bcs_matrix_write(const struct BcsMatrix *m, const char *path);

// Releases a handle. Null is ignored.
//
// # Safety
// `m` must be null or a handle not yet freed.
void bcs_matrix_free(struct BcsMatrix *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOCKCS_H */
