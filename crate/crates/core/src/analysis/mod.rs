//! Exact metrics for constructed matrices.
//!
//! Everything here except OMP works in integer or rational arithmetic:
//! overlaps and inner products are integers, and coherence, density and RIP
//! constants are rationals. For matrices whose nonzeros are all ±1 with a
//! common column weight `k`, every column has norm `sqrt(k)` and the
//! coherence is simply `max |<a_i, a_j>| / k`.

mod omp;

pub use omp::{
    omp_monte_carlo, omp_one_sparse_sweep, omp_recover, OmpResult, OmpSolver, RecoveryStats,
};

use num_bigint::BigUint;
use num_integer::{binomial, Roots};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::block::BlockBinaryMatrix;
use crate::compose::{composed_rows, ComposeParams};
use crate::error::{Error, Result};
use crate::io::ratio_as_string;
use crate::sparse::SensingMatrix;

/// Default column count above which the CLI refuses to brute-force pairs
/// without `--force`.
pub const BRUTE_FORCE_COLUMN_CEILING: usize = 10_000;

fn require_pairs<M: SensingMatrix + ?Sized>(m: &M) -> Result<()> {
    if m.cols() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "pairwise metrics need at least two columns, got {}",
            m.cols()
        )));
    }
    Ok(())
}

/// Largest `|<a_i, a_j>|` over distinct column pairs; for binary matrices the
/// largest support intersection. Exhaustive over all pairs.
pub fn max_overlap<M: SensingMatrix + ?Sized>(m: &M) -> Result<u64> {
    require_pairs(m)?;
    let cols = m.cols();
    Ok((0..cols)
        .into_par_iter()
        .map(|i| {
            (i + 1..cols)
                .map(|j| m.inner(i, j).unsigned_abs())
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0))
}

/// Nonzeros over total entries.
pub fn density<M: SensingMatrix + ?Sized>(m: &M) -> Ratio<u64> {
    let total = m.rows() as u64 * m.cols() as u64;
    if total == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(m.nnz() as u64, total)
}

/// Square of the mutual coherence, `max <a_i, a_j>^2 / (|a_i|^2 |a_j|^2)`,
/// for matrices with entries in {-1, 0, 1}.
pub fn coherence_squared<M: SensingMatrix + ?Sized>(m: &M) -> Result<Ratio<u64>> {
    require_pairs(m)?;
    let cols = m.cols();
    if (0..cols).any(|j| m.column_weight(j) == 0) {
        return Err(Error::UndefinedMetric(
            "a column is identically zero".into(),
        ));
    }
    Ok((0..cols)
        .into_par_iter()
        .map(|i| {
            let wi = m.column_weight(i) as u64;
            (i + 1..cols)
                .map(|j| {
                    let ip = m.inner(i, j).unsigned_abs();
                    Ratio::new(ip * ip, wi * m.column_weight(j) as u64)
                })
                .max()
                .unwrap_or_else(|| Ratio::from_integer(0))
        })
        .max()
        .unwrap_or_else(|| Ratio::from_integer(0)))
}

/// Mutual coherence as an exact rational.
///
/// With a uniform column weight `k` this is `max_overlap / k`. Otherwise the
/// general normalized definition is used, which is exact only when the
/// result is rational.
pub fn coherence<M: SensingMatrix + ?Sized>(m: &M) -> Result<Ratio<u64>> {
    require_pairs(m)?;
    match m.uniform_weight() {
        Some(0) => Err(Error::UndefinedMetric(
            "columns are identically zero".into(),
        )),
        Some(k) => Ok(Ratio::new(max_overlap(m)?, k as u64)),
        None => {
            let squared = coherence_squared(m)?;
            let (num, den) = (*squared.numer(), *squared.denom());
            let (rn, rd) = (num.sqrt(), den.sqrt());
            if rn * rn == num && rd * rd == den {
                Ok(Ratio::new(rn, rd))
            } else {
                Err(Error::IrrationalCoherence { squared })
            }
        }
    }
}

/// RIP constant bound `(order - 1) * mu` and whether `order` lies in the
/// range `order < 1/mu + 1` where that bound stays below 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RipConstant {
    pub order: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub delta: Ratio<u64>,
    pub in_regime: bool,
}

pub fn rip_from_coherence(mu: Ratio<u64>, order: u64) -> Result<RipConstant> {
    if order == 0 {
        return Err(Error::param("RIP order must be positive"));
    }
    let delta = mu * Ratio::from_integer(order - 1);
    Ok(RipConstant {
        order,
        delta,
        in_regime: delta < Ratio::from_integer(1),
    })
}

pub fn rip_constant<M: SensingMatrix + ?Sized>(m: &M, order: u64) -> Result<RipConstant> {
    rip_from_coherence(coherence(m)?, order)
}

/// Largest `s` with `(s - 1) * mu < 1`; `fallback` when `mu = 0`.
pub fn rip_order_bound(mu: Ratio<u64>, fallback: u64) -> u64 {
    if *mu.numer() == 0 {
        return fallback.max(1);
    }
    // s - 1 < den/num  <=>  s <= ceil(den/num)
    mu.recip().ceil().to_integer()
}

/// Packing bound on the number of columns of a binary matrix with `rows`
/// rows, column weight `weight` and pairwise overlap at most `overlap`:
/// `floor(C(rows, overlap + 1) / C(weight, overlap + 1))`.
pub fn max_column_bound(rows: u64, weight: u64, overlap: u64) -> Result<BigUint> {
    if overlap + 1 > weight || weight > rows {
        return Err(Error::param(format!(
            "need overlap + 1 <= weight <= rows (got overlap {overlap}, weight {weight}, rows {rows})"
        )));
    }
    let t = BigUint::from(overlap + 1);
    let top = binomial(BigUint::from(rows), t.clone());
    let bottom = binomial(BigUint::from(weight), t);
    Ok(top / bottom)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KroneckerComparison {
    pub kronecker_shape: (usize, usize),
    pub composed_shape: (usize, usize),
    #[serde(serialize_with = "ratio_as_string")]
    pub kronecker_aspect: Ratio<u64>,
    #[serde(serialize_with = "ratio_as_string")]
    pub composed_aspect: Ratio<u64>,
}

/// Shapes of the Kronecker product `a ⊗ b` and of the composition of `a`
/// and `b` with `k` blocks. Both have `M M'` columns; the composition has
/// `n n' k` rows against `n k_a n' k_b`.
pub fn kronecker_shape_compare(
    a: &BlockBinaryMatrix,
    b: &BlockBinaryMatrix,
    k: u32,
) -> Result<KroneckerComparison> {
    let params = ComposeParams::new(k);
    if k == 0 || k > a.k().min(b.k()) {
        return Err(Error::param(format!(
            "k = {k} must lie in 1..={}",
            a.k().min(b.k())
        )));
    }
    if a.overlap_bound().max(b.overlap_bound()) > params.k {
        return Err(Error::param(format!(
            "overlap bound {} exceeds k = {k}",
            a.overlap_bound().max(b.overlap_bound())
        )));
    }
    let cols = a.cols() * b.cols();
    let kron = (a.rows() * b.rows(), cols);
    let comp = (composed_rows(a, b, k), cols);
    if k < a.k() * b.k() && comp.0 >= kron.0 {
        return Err(Error::Verification(format!(
            "composed rows {} not below Kronecker rows {}",
            comp.0, kron.0
        )));
    }
    let aspect = |(r, c): (usize, usize)| Ratio::new(c as u64, r as u64);
    Ok(KroneckerComparison {
        kronecker_shape: kron,
        composed_shape: comp,
        kronecker_aspect: aspect(kron),
        composed_aspect: aspect(comp),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub rows: usize,
    pub cols: usize,
    /// Common column weight.
    pub k: usize,
    #[serde(serialize_with = "ratio_as_string")]
    pub density: Ratio<u64>,
    pub max_overlap: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub coherence: Ratio<u64>,
    pub rip_order_bound: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub aspect_ratio: Ratio<u64>,
}

/// Full report for a matrix with a common column weight.
pub fn analyze<M: SensingMatrix + ?Sized>(m: &M) -> Result<AnalysisReport> {
    require_pairs(m)?;
    let k = m
        .uniform_weight()
        .ok_or_else(|| Error::UndefinedMetric("column weights are not uniform".into()))?;
    if k == 0 {
        return Err(Error::UndefinedMetric(
            "columns are identically zero".into(),
        ));
    }
    let max_overlap = max_overlap(m)?;
    let coherence = Ratio::new(max_overlap, k as u64);
    Ok(AnalysisReport {
        rows: m.rows(),
        cols: m.cols(),
        k,
        density: density(m),
        max_overlap,
        coherence,
        rip_order_bound: rip_order_bound(coherence, m.cols() as u64),
        aspect_ratio: Ratio::new(m.cols() as u64, m.rows() as u64),
    })
}
