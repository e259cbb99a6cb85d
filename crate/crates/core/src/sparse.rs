//! Column-compressed integer matrices with entries in {-1, 0, +1}.
//!
//! Every construction in this crate can be viewed through [`SensingMatrix`],
//! which is what the analysis routines consume. [`SparseColumns`] is the
//! neutral form used for file I/O and for inputs that carry no block
//! structure.

use crate::error::{Error, Result};

/// Read-only column access shared by all matrix forms.
pub trait SensingMatrix: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// Number of nonzeros in column `j` (0-based column index).
    fn column_weight(&self, j: usize) -> usize;

    /// Exact inner product of columns `i` and `j`. For binary matrices this
    /// is the size of the support intersection.
    fn inner(&self, i: usize, j: usize) -> i64;

    /// Nonzeros of column `j` as `(row, value)` pairs, rows 1-based and ascending.
    fn column_entries(&self, j: usize) -> Vec<(u32, i8)>;

    fn nnz(&self) -> usize {
        (0..self.cols()).map(|j| self.column_weight(j)).sum()
    }

    /// Common column weight, or `None` when weights differ (or there are no columns).
    fn uniform_weight(&self) -> Option<usize> {
        if self.cols() == 0 {
            return None;
        }
        let first = self.column_weight(0);
        (1..self.cols())
            .all(|j| self.column_weight(j) == first)
            .then_some(first)
    }

    fn to_sparse(&self) -> SparseColumns {
        let mut col_ptr = Vec::with_capacity(self.cols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..self.cols() {
            for (r, v) in self.column_entries(j) {
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        SparseColumns {
            rows: self.rows(),
            cols: self.cols(),
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Row-major dense copy. Only meant for small matrices and tests.
    #[allow(clippy::needless_range_loop)]
    fn to_dense(&self) -> Vec<Vec<i8>> {
        let mut dense = vec![vec![0i8; self.cols()]; self.rows()];
        for j in 0..self.cols() {
            for (r, v) in self.column_entries(j) {
                dense[r as usize - 1][j] = v;
            }
        }
        dense
    }
}

/// Compressed sparse column matrix with 1-based row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseColumns {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<i8>,
}

impl SparseColumns {
    /// Builds a matrix from per-column `(row, value)` lists. Rows are 1-based;
    /// each column is sorted by row. Zero values are dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, i8)>>) -> Result<Self> {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, mut col) in columns.into_iter().enumerate() {
            col.retain(|&(_, v)| v != 0);
            col.sort_unstable_by_key(|&(r, _)| r);
            for w in col.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::malformed(format!(
                        "column {} has two entries in row {}",
                        j + 1,
                        w[0].0
                    )));
                }
            }
            for (r, v) in col {
                if r == 0 || r as usize > rows {
                    return Err(Error::Range {
                        what: "row index",
                        value: r as u64,
                        min: 1,
                        max: rows as u64,
                    });
                }
                if !(-1..=1).contains(&v) {
                    return Err(Error::malformed(format!(
                        "entry {v} in column {} is not in {{-1, 0, 1}}",
                        j + 1
                    )));
                }
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Ok(SparseColumns {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn column_rows(&self, j: usize) -> &[u32] {
        &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn column_values(&self, j: usize) -> &[i8] {
        &self.values[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }
}

impl SensingMatrix for SparseColumns {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn column_weight(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    fn inner(&self, i: usize, j: usize) -> i64 {
        let (ra, va) = (self.column_rows(i), self.column_values(i));
        let (rb, vb) = (self.column_rows(j), self.column_values(j));
        let (mut a, mut b, mut acc) = (0, 0, 0i64);
        while a < ra.len() && b < rb.len() {
            match ra[a].cmp(&rb[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += va[a] as i64 * vb[b] as i64;
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    fn column_entries(&self, j: usize) -> Vec<(u32, i8)> {
        self.column_rows(j)
            .iter()
            .copied()
            .zip(self.column_values(j).iter().copied())
            .collect()
    }

    fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    fn to_sparse(&self) -> SparseColumns {
        self.clone()
    }
}
