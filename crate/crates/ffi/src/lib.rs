//! C ABI over `blockcs`.
//!
//! Matrices cross the boundary as opaque `BcsMatrix` handles owned by the
//! caller and released with `bcs_matrix_free`. Every fallible call returns a
//! `BcsStatus`; on failure `bcs_last_error` gives a message for the calling
//! thread, valid until that thread's next call into the library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use blockcs::analysis;
use blockcs::io::{Construction, Params};
use blockcs::planner::plan_row_size_with_degree;
use blockcs::{
    compose, devore_matrix, execute_plan, hadamard_expand, sign_flip, AnyMatrix, ComposeParams,
    DevoreParams, Error, MatrixFile, SensingMatrix,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcsStatus {
    Ok = 0,
    /// File could not be read or written.
    Io = 1,
    /// Invalid parameter or a construction outside its domain.
    Param = 2,
    /// Malformed matrix file or matrix data.
    Malformed = 3,
    /// A recomputed property disagrees with the declared one.
    Verify = 4,
    /// A required pointer argument was null.
    Null = -1,
    /// The library panicked; the handle arguments are left untouched.
    Panic = -2,
}

/// Opaque matrix handle.
pub struct BcsMatrix {
    file: MatrixFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(BcsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            1 => BcsStatus::Io,
            3 => BcsStatus::Malformed,
            4 => BcsStatus::Verify,
            _ => BcsStatus::Param,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BcsStatus::Null, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BcsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BcsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BcsStatus::Panic
        }
    }
}

unsafe fn handle<'a>(m: *const BcsMatrix, what: &str) -> Result<&'a BcsMatrix, Failure> {
    m.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit(out: *mut *mut BcsMatrix, file: MatrixFile) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(BcsMatrix { file }));
    Ok(())
}

unsafe fn binary<'a>(
    m: *const BcsMatrix,
    what: &str,
) -> Result<&'a blockcs::BlockBinaryMatrix, Failure> {
    handle(m, what)?.file.matrix.as_binary().ok_or_else(|| {
        Failure(
            BcsStatus::Param,
            format!("{what} is not a block binary matrix"),
        )
    })
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(BcsStatus::Param, "path is not valid UTF-8".into()))
}

fn ratio_out(
    value: blockcs::Result<(u64, u64)>,
    num: *mut u64,
    den: *mut u64,
) -> Result<(), Failure> {
    if num.is_null() || den.is_null() {
        return Err(null("output"));
    }
    let (n, d) = value?;
    unsafe {
        *num = n;
        *den = d;
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after success.
#[no_mangle]
pub extern "C" fn bcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Polynomial-graph matrix of size `p^2 x p^(r+1)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bcs_devore(p: u32, r: u32, out: *mut *mut BcsMatrix) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = devore_matrix(DevoreParams::new(p, r)?)?;
        let params = Params {
            p: Some(p),
            r: Some(r),
            ..Params::default()
        };
        emit(
            out,
            MatrixFile::new(
                AnyMatrix::Binary(m),
                Construction::Devore,
                params,
                vec![],
                vec![],
            ),
        )
    })
}

/// Composes two block binary matrices keeping `k` blocks.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_compose(
    a: *const BcsMatrix,
    b: *const BcsMatrix,
    k: u32,
    out: *mut *mut BcsMatrix,
) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (fa, fb) = (&handle(a, "a")?.file, &handle(b, "b")?.file);
        let m = compose(binary(a, "a")?, binary(b, "b")?, ComposeParams::new(k))?;
        let params = Params {
            k: Some(k),
            ..Params::default()
        };
        let provenance = vec![fa.provenance(), fb.provenance()];
        emit(
            out,
            MatrixFile::new(
                AnyMatrix::Binary(m),
                Construction::Compose,
                params,
                provenance,
                vec![],
            ),
        )
    })
}

/// Plans and builds a binary matrix with exactly `rows` rows, using degree
/// bound `r` for every base matrix.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_plan_execute(
    rows: u64,
    r: u32,
    out: *mut *mut BcsMatrix,
) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let plan = plan_row_size_with_degree(rows, r)?;
        let m = execute_plan(&plan)?;
        let params = Params {
            r: Some(r),
            k: Some(plan.k),
            m: Some(rows),
            ..Params::default()
        };
        emit(
            out,
            MatrixFile::new(
                AnyMatrix::Binary(m),
                Construction::Plan,
                params,
                vec![],
                vec![],
            ),
        )
    })
}

/// Ternary matrix with the sign of each one set by its block position.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_sign_flip(m: *const BcsMatrix, out: *mut *mut BcsMatrix) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = &handle(m, "m")?.file;
        let b = binary(m, "m")?;
        let params = Params {
            r: Some(b.overlap_bound()),
            ..Params::default()
        };
        let file = MatrixFile::new(
            AnyMatrix::Ternary(sign_flip(b)),
            Construction::Signflip,
            params,
            vec![src.provenance()],
            vec![],
        );
        emit(out, file)
    })
}

/// Replaces each column's ones by Hadamard rows of order `k + r_prime`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_hadamard_expand(
    m: *const BcsMatrix,
    r_prime: u32,
    out: *mut *mut BcsMatrix,
) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = &handle(m, "m")?.file;
        let b = binary(m, "m")?;
        let h = hadamard_expand(b, r_prime as usize)?;
        let params = Params {
            r: Some(b.overlap_bound()),
            r_prime: Some(r_prime),
            ..Params::default()
        };
        emit(
            out,
            MatrixFile::new(
                AnyMatrix::Hadamard(h),
                Construction::Hadamard,
                params,
                vec![src.provenance()],
                vec![],
            ),
        )
    })
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_rows(m: *const BcsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.file.matrix.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_cols(m: *const BcsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.file.matrix.cols())
}

/// Number of nonzero entries, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_nnz(m: *const BcsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.file.matrix.nnz())
}

/// Nonzeros of 0-based column `j` as 1-based row indices and values.
///
/// `*len` always receives the column weight. With null `rows` and `values`
/// nothing else is written; otherwise both must hold `capacity` elements
/// and `capacity` must be at least the weight.
///
/// # Safety
/// `m` must be a live handle, `len` writable, and `rows`/`values` null or
/// valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_column(
    m: *const BcsMatrix,
    j: usize,
    rows: *mut u32,
    values: *mut i8,
    capacity: usize,
    len: *mut usize,
) -> BcsStatus {
    guard(|| {
        let m = &handle(m, "m")?.file.matrix;
        if len.is_null() {
            return Err(null("len"));
        }
        if j >= m.cols() {
            return Err(Failure(
                BcsStatus::Param,
                format!("column {j} out of range for {} columns", m.cols()),
            ));
        }
        let entries = m.column_entries(j);
        *len = entries.len();
        if rows.is_null() && values.is_null() {
            return Ok(());
        }
        if rows.is_null() || values.is_null() {
            return Err(null("rows or values"));
        }
        if capacity < entries.len() {
            return Err(Failure(
                BcsStatus::Param,
                format!("capacity {capacity} below column weight {}", entries.len()),
            ));
        }
        for (i, (r, v)) in entries.into_iter().enumerate() {
            *rows.add(i) = r;
            *values.add(i) = v;
        }
        Ok(())
    })
}

/// Largest `|<a_i, a_j>|` over distinct columns, by brute force.
///
/// # Safety
/// `m` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_max_overlap(m: *const BcsMatrix, out: *mut u64) -> BcsStatus {
    guard(|| {
        let m = handle(m, "m")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = analysis::max_overlap(&m.file.matrix)?;
        Ok(())
    })
}

/// Exact mutual coherence as `num / den`.
///
/// # Safety
/// `m` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_coherence(
    m: *const BcsMatrix,
    num: *mut u64,
    den: *mut u64,
) -> BcsStatus {
    guard(|| {
        let mu = analysis::coherence(&handle(m, "m")?.file.matrix);
        ratio_out(mu.map(|r| (*r.numer(), *r.denom())), num, den)
    })
}

/// Exact density (nonzeros over entries) as `num / den`.
///
/// # Safety
/// `m` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_density(
    m: *const BcsMatrix,
    num: *mut u64,
    den: *mut u64,
) -> BcsStatus {
    guard(|| {
        let d = analysis::density(&handle(m, "m")?.file.matrix);
        ratio_out(Ok((*d.numer(), *d.denom())), num, den)
    })
}

/// Reads `path` and its `.meta.json` sidecar.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_read(
    path: *const c_char,
    out: *mut *mut BcsMatrix,
) -> BcsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let file = MatrixFile::read(path_arg(path)?)?;
        emit(out, file)
    })
}

/// Writes the Matrix Market payload to `path` and metadata beside it.
///
/// # Safety
/// `m` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_write(m: *const BcsMatrix, path: *const c_char) -> BcsStatus {
    guard(|| {
        let m = handle(m, "m")?;
        m.file.write(path_arg(path)?)?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bcs_matrix_free(m: *mut BcsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
