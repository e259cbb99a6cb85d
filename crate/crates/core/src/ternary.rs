//! Ternary sensing matrices derived from binary ones.
//!
//! Two routes: [`sign_flip`] negates selected ones of a block binary matrix
//! in place, and [`hadamard_expand`] replaces every one of a column with a
//! row of a Sylvester Hadamard matrix, widening the matrix by `k + r'`.

use crate::block::{BlockBinaryMatrix, TernaryBlockMatrix};
use crate::error::{Error, Result};
use crate::sparse::{SensingMatrix, SparseColumns};

/// Negates the one in block `l` whenever `l` exceeds its within-block
/// position. The sign depends only on `(block, position)`, so every
/// pairwise inner product keeps its magnitude.
pub fn sign_flip(phi: &BlockBinaryMatrix) -> TernaryBlockMatrix {
    let signs = phi
        .tuples()
        .iter()
        .flat_map(|t| {
            t.iter()
                .enumerate()
                .map(|(l, &a)| if l as u32 + 1 > a { -1 } else { 1 })
        })
        .collect();
    TernaryBlockMatrix::new(phi.tuples().clone(), signs).expect("one sign per support entry")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.order + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.order..(row + 1) * self.order]
    }

    /// `H H^T` computed exactly, row-major.
    pub fn gram(&self) -> Vec<i64> {
        let n = self.order;
        let mut g = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(&a, &b)| a as i64 * b as i64)
                    .sum();
            }
        }
        g
    }
}

/// Sylvester doubling `H_2m = [[H_m, H_m], [H_m, -H_m]]` from `H_1 = [1]`.
pub fn hadamard_sylvester(order: usize) -> Result<HadamardMatrix> {
    if !order.is_power_of_two() {
        return Err(Error::param(format!(
            "Hadamard order {order} is not a power of two"
        )));
    }
    let mut h = vec![1i8];
    let mut size = 1;
    while size < order {
        let next = size * 2;
        let mut grown = vec![0i8; next * next];
        for i in 0..size {
            for j in 0..size {
                let v = h[i * size + j];
                grown[i * next + j] = v;
                grown[i * next + j + size] = v;
                grown[(i + size) * next + j] = v;
                grown[(i + size) * next + j + size] = -v;
            }
        }
        h = grown;
        size = next;
    }
    Ok(HadamardMatrix { order, entries: h })
}

/// Ternary matrix produced by [`hadamard_expand`].
///
/// Parent column `j` spawns columns `j * spawn .. (j + 1) * spawn`, where
/// `spawn = k + r'`. Every column holds exactly `k` nonzeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardTernaryMatrix {
    rows: usize,
    weight: usize,
    r_prime: usize,
    row_idx: Vec<u32>,
    values: Vec<i8>,
}

impl HadamardTernaryMatrix {
    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn r_prime(&self) -> usize {
        self.r_prime
    }

    /// Columns spawned per parent column.
    pub fn spawn(&self) -> usize {
        self.weight + self.r_prime
    }

    /// 0-based index of the parent column that spawned column `j`.
    pub fn parent(&self, j: usize) -> usize {
        j / self.spawn()
    }

    pub fn parent_count(&self) -> usize {
        self.cols() / self.spawn()
    }

    fn span(&self, j: usize) -> std::ops::Range<usize> {
        j * self.weight..(j + 1) * self.weight
    }

    /// Rebuilds the structure from sparse columns, checking the uniform
    /// weight and that column count is a multiple of `weight + r_prime`.
    pub fn from_sparse(matrix: &SparseColumns, weight: usize, r_prime: usize) -> Result<Self> {
        if weight == 0 {
            return Err(Error::malformed("column weight must be positive"));
        }
        if !matrix.cols().is_multiple_of(weight + r_prime) {
            return Err(Error::malformed(format!(
                "{} columns do not split into groups of {}",
                matrix.cols(),
                weight + r_prime
            )));
        }
        let mut row_idx = Vec::with_capacity(matrix.cols() * weight);
        let mut values = Vec::with_capacity(matrix.cols() * weight);
        for j in 0..matrix.cols() {
            if matrix.column_weight(j) != weight {
                return Err(Error::malformed(format!(
                    "column {} has weight {}, expected {weight}",
                    j + 1,
                    matrix.column_weight(j)
                )));
            }
            row_idx.extend_from_slice(matrix.column_rows(j));
            values.extend_from_slice(matrix.column_values(j));
        }
        Ok(HadamardTernaryMatrix {
            rows: matrix.rows(),
            weight,
            r_prime,
            row_idx,
            values,
        })
    }
}

impl SensingMatrix for HadamardTernaryMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.row_idx.len() / self.weight
    }

    fn column_weight(&self, _j: usize) -> usize {
        self.weight
    }

    fn inner(&self, i: usize, j: usize) -> i64 {
        let (ra, va) = (&self.row_idx[self.span(i)], &self.values[self.span(i)]);
        let (rb, vb) = (&self.row_idx[self.span(j)], &self.values[self.span(j)]);
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
        self.row_idx[self.span(j)]
            .iter()
            .copied()
            .zip(self.values[self.span(j)].iter().copied())
            .collect()
    }

    fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    fn uniform_weight(&self) -> Option<usize> {
        (self.cols() > 0).then_some(self.weight)
    }
}

/// Values of `r'` in `0..=r` for which `k + r'` is a Sylvester order.
pub fn admissible_r_primes(k: usize, r: usize) -> Vec<usize> {
    (0..=r).filter(|rp| (k + rp).is_power_of_two()).collect()
}

/// Replaces the ones of every column of the block matrix `psi` by rows of
/// a Hadamard matrix of order `k + r_prime`, using `psi`'s declared overlap
/// bound as `r`.
pub fn hadamard_expand(psi: &BlockBinaryMatrix, r_prime: usize) -> Result<HadamardTernaryMatrix> {
    hadamard_expand_columns(&psi.to_sparse(), psi.overlap_bound() as usize, r_prime)
}

/// [`hadamard_expand`] for any binary matrix with uniform column weight `k`
/// and pairwise overlap at most `r`.
///
/// The `s`-th smallest support row of a parent column receives Hadamard row
/// `s`; spawned column `t` takes entry `H[s][t]` there.
pub fn hadamard_expand_columns(
    psi: &SparseColumns,
    r: usize,
    r_prime: usize,
) -> Result<HadamardTernaryMatrix> {
    if !psi.is_binary() {
        return Err(Error::malformed("Hadamard expansion needs a binary matrix"));
    }
    let k = psi
        .uniform_weight()
        .ok_or_else(|| Error::malformed("columns do not share a common weight"))?;
    if k == 0 {
        return Err(Error::malformed("columns are empty"));
    }
    if r_prime > r {
        return Err(Error::param(format!(
            "r' = {r_prime} exceeds the overlap bound r = {r}"
        )));
    }
    let order = k + r_prime;
    if !order.is_power_of_two() {
        let ok = admissible_r_primes(k, r);
        let hint = if ok.is_empty() {
            format!("no power of two lies in [{k}, {}]", k + r)
        } else {
            let orders: Vec<String> = ok
                .iter()
                .map(|rp| format!("r' = {rp} (order {})", k + rp))
                .collect();
            format!("admissible: {}", orders.join(", "))
        };
        return Err(Error::param(format!(
            "k + r' = {order} is not a Sylvester Hadamard order; {hint}"
        )));
    }
    let h = hadamard_sylvester(order)?;

    let spawned = psi.cols() * order;
    let mut row_idx = Vec::with_capacity(spawned * k);
    let mut values = Vec::with_capacity(spawned * k);
    for j in 0..psi.cols() {
        let support = psi.column_rows(j);
        for t in 0..order {
            for (s, &row) in support.iter().enumerate() {
                row_idx.push(row);
                values.push(h.get(s, t));
            }
        }
    }
    Ok(HadamardTernaryMatrix {
        rows: psi.rows(),
        weight: k,
        r_prime,
        row_idx,
        values,
    })
}
