//! Orthogonal matching pursuit on a dense copy of a sensing matrix.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::SensingMatrix;

/// Residual 2-norm below which pursuit stops early.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OmpResult {
    /// Selected columns (0-based) in selection order.
    pub support: Vec<usize>,
    /// Least-squares coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
}

/// Dense matrix plus column norms, reusable across recoveries.
pub struct OmpSolver {
    dense: DMatrix<f64>,
    norms: Vec<f64>,
}

impl OmpSolver {
    pub fn new<M: SensingMatrix + ?Sized>(matrix: &M) -> Self {
        let mut dense = DMatrix::zeros(matrix.rows(), matrix.cols());
        for j in 0..matrix.cols() {
            for (r, v) in matrix.column_entries(j) {
                dense[(r as usize - 1, j)] = v as f64;
            }
        }
        let norms = dense.column_iter().map(|c| c.norm()).collect();
        OmpSolver { dense, norms }
    }

    pub fn rows(&self) -> usize {
        self.dense.nrows()
    }

    pub fn cols(&self) -> usize {
        self.dense.ncols()
    }

    /// Measurements `A x` for a sparse `x` given as `(column, value)` pairs.
    pub fn measure(&self, x: &[(usize, f64)]) -> DVector<f64> {
        let mut y = DVector::zeros(self.rows());
        for &(j, v) in x {
            y.axpy(v, &self.dense.column(j), 1.0);
        }
        y
    }

    /// Runs at most `sparsity` greedy iterations, stopping early once the
    /// residual norm drops below [`RESIDUAL_TOLERANCE`].
    pub fn recover(&self, y: &[f64], sparsity: usize) -> Result<OmpResult> {
        if y.len() != self.rows() {
            return Err(Error::param(format!(
                "measurement length {} does not match {} rows",
                y.len(),
                self.rows()
            )));
        }
        if sparsity == 0 || sparsity > self.cols() {
            return Err(Error::param(format!(
                "sparsity {sparsity} must lie in 1..={}",
                self.cols()
            )));
        }
        let y = DVector::from_column_slice(y);
        let mut residual = y.clone();
        let mut support: Vec<usize> = Vec::with_capacity(sparsity);
        let mut coefficients = DVector::zeros(0);

        while support.len() < sparsity && residual.norm() >= RESIDUAL_TOLERANCE {
            let corr = self.dense.tr_mul(&residual);
            let mut best: Option<(usize, f64)> = None;
            for (j, c) in corr.iter().enumerate() {
                if self.norms[j] == 0.0 || support.contains(&j) {
                    continue;
                }
                let score = c.abs() / self.norms[j];
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((j, score));
                }
            }
            let Some((pick, _)) = best else { break };
            support.push(pick);

            let active = self.dense.select_columns(&support);
            coefficients = least_squares(active.clone(), &y)?;
            residual = &y - &active * &coefficients;
        }

        Ok(OmpResult {
            support,
            coefficients: coefficients.iter().copied().collect(),
            residual_norm: residual.norm(),
        })
    }
}

fn least_squares(a: DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let scale = a.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let qr = a.qr();
    let r = qr.r();
    if let Some(i) = (0..r.nrows()).find(|&i| r[(i, i)].abs() <= 1e-10 * scale.max(1.0)) {
        return Err(Error::Degenerate(format!(
            "active set is rank deficient at column {}",
            i + 1
        )));
    }
    let qty = qr.q().tr_mul(y);
    r.solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Degenerate("triangular solve failed".into()))
}

/// One-shot [`OmpSolver::recover`].
pub fn omp_recover<M: SensingMatrix + ?Sized>(
    matrix: &M,
    y: &[f64],
    sparsity: usize,
) -> Result<OmpResult> {
    OmpSolver::new(matrix).recover(y, sparsity)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryStats {
    pub trials: usize,
    pub exact: usize,
    /// Largest coefficient error over trials whose support was recovered.
    pub max_coefficient_error: f64,
}

impl RecoveryStats {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.exact as f64 / self.trials as f64
    }

    pub fn all_exact(&self) -> bool {
        self.exact == self.trials
    }

    fn record(&mut self, truth: &[(usize, f64)], got: &OmpResult, tol: f64) {
        self.trials += 1;
        let mut want: Vec<usize> = truth.iter().map(|&(j, _)| j).collect();
        let mut have = got.support.clone();
        want.sort_unstable();
        have.sort_unstable();
        if want != have {
            return;
        }
        let err = truth
            .iter()
            .map(|&(j, v)| {
                let pos = got
                    .support
                    .iter()
                    .position(|&s| s == j)
                    .expect("same support");
                (got.coefficients[pos] - v).abs()
            })
            .fold(0.0, f64::max);
        self.max_coefficient_error = self.max_coefficient_error.max(err);
        if err <= tol {
            self.exact += 1;
        }
    }
}

/// Seeded Monte Carlo: random `sparsity`-sparse signals with uniformly
/// chosen support and coefficients of magnitude in [0.5, 2] with random
/// sign. A trial succeeds when the support matches and every coefficient
/// is within `tol`.
pub fn omp_monte_carlo<M: SensingMatrix + ?Sized>(
    matrix: &M,
    sparsity: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<RecoveryStats> {
    let solver = OmpSolver::new(matrix);
    if sparsity == 0 || sparsity > solver.cols() {
        return Err(Error::param(format!(
            "sparsity {sparsity} must lie in 1..={}",
            solver.cols()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = RecoveryStats {
        trials: 0,
        exact: 0,
        max_coefficient_error: 0.0,
    };
    for _ in 0..trials {
        let support = rand::seq::index::sample(&mut rng, solver.cols(), sparsity);
        let truth: Vec<(usize, f64)> = support
            .iter()
            .map(|j| {
                let mag = rng.random_range(0.5..=2.0);
                (j, if rng.random_bool(0.5) { mag } else { -mag })
            })
            .collect();
        let y = solver.measure(&truth);
        let got = solver.recover(y.as_slice(), sparsity)?;
        stats.record(&truth, &got, tol);
    }
    Ok(stats)
}

/// Recovers `c * a_j` for every column `j` and each `c` in `coefficients`.
pub fn omp_one_sparse_sweep<M: SensingMatrix + ?Sized>(
    matrix: &M,
    coefficients: &[f64],
    tol: f64,
) -> Result<RecoveryStats> {
    let solver = OmpSolver::new(matrix);
    let mut stats = RecoveryStats {
        trials: 0,
        exact: 0,
        max_coefficient_error: 0.0,
    };
    for j in 0..solver.cols() {
        for &c in coefficients {
            let truth = [(j, c)];
            let y = solver.measure(&truth);
            let got = solver.recover(y.as_slice(), 1)?;
            stats.record(&truth, &got, tol);
        }
    }
    Ok(stats)
}
