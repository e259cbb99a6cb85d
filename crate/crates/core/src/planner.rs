//! Row-size planning: a binary sensing matrix with exactly `m` rows for every
//! `m` with at least three prime factors (counted with multiplicity).
//!
//! The smallest prime factor becomes the retained block count `k`; every
//! other prime factor `p` contributes a polynomial-graph base matrix with
//! block size `p`. Chaining the bases with `k` blocks gives
//! `k * prod(p) = m` rows.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::block::BlockBinaryMatrix;
use crate::compose::compose_chain;
use crate::devore::{devore_matrix, DevoreParams};
use crate::error::{Error, Result};
use crate::sparse::SensingMatrix;

/// Prime factors of `m` in ascending order, with multiplicity.
pub fn factorize(m: u64) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::param(format!("cannot factor {m}; need m >= 2")));
    }
    let mut rest = m;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        while rest.is_multiple_of(d) {
            factors.push(d);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(rest);
    }
    Ok(factors)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositionPlan {
    pub target_rows: u64,
    pub k: u32,
    pub bases: Vec<DevoreParams>,
    pub predicted_rows: u64,
    pub predicted_cols: u128,
    #[serde(serialize_with = "crate::io::ratio_as_string")]
    pub predicted_coherence: Ratio<u64>,
}

const EXCLUSION: &str = "the composition theorem covers row sizes different from p, p², pq";

/// Plans a matrix with `m` rows using degree bound 1 for every base.
pub fn plan_row_size(m: u64) -> Result<CompositionPlan> {
    plan_row_size_with_degree(m, 1)
}

/// Plans a matrix with `m` rows using degree bound `r` for every base.
///
/// Needs `r < k` (otherwise cutting the bases to `k` blocks merges columns)
/// and `r < p` for every base prime.
pub fn plan_row_size_with_degree(m: u64, r: u32) -> Result<CompositionPlan> {
    if m == 0 {
        return Err(Error::param("row size must be positive"));
    }
    if m == 1 {
        return Err(Error::NotCovered(format!("m = 1: {EXCLUSION}")));
    }
    let factors = factorize(m)?;
    match factors.as_slice() {
        [_] => {
            return Err(Error::NotCovered(format!("m = {m} is prime: {EXCLUSION}")));
        }
        [p, q] if p == q => {
            return Err(Error::NotCovered(format!(
                "m = {m} = {p}²: {EXCLUSION}; devore_matrix(p = {p}, r) already provides {m} rows directly"
            )));
        }
        [p, q] => {
            return Err(Error::NotCovered(format!("m = {m} = {p}·{q}: {EXCLUSION}")));
        }
        _ => {}
    }

    let k = u32::try_from(factors[0]).map_err(|_| Error::param("block count overflows"))?;
    if r == 0 || r >= k {
        return Err(Error::param(format!(
            "degree bound r = {r} must satisfy 1 <= r < k = {k}"
        )));
    }
    let bases = factors[1..]
        .iter()
        .map(|&p| {
            let p = u32::try_from(p).map_err(|_| Error::param(format!("prime {p} too large")))?;
            DevoreParams::new(p, r)
        })
        .collect::<Result<Vec<_>>>()?;

    let predicted_cols = bases
        .iter()
        .try_fold(1u128, |acc, b| {
            (b.p() as u128)
                .checked_pow(b.r() + 1)
                .and_then(|c| acc.checked_mul(c))
        })
        .ok_or_else(|| Error::param(format!("predicted column count for m = {m} overflows")))?;

    Ok(CompositionPlan {
        target_rows: m,
        k,
        predicted_rows: m,
        predicted_cols,
        predicted_coherence: Ratio::new(r as u64, k as u64),
        bases,
    })
}

impl CompositionPlan {
    fn check(&self) -> Result<()> {
        let bad = |why: String| Err(Error::param(format!("malformed plan: {why}")));
        if self.bases.len() < 2 {
            return bad(format!(
                "{} base matrices, need at least 2",
                self.bases.len()
            ));
        }
        let rows = self
            .bases
            .iter()
            .try_fold(self.k as u64, |acc, b| acc.checked_mul(b.p() as u64));
        if rows != Some(self.target_rows) || self.predicted_rows != self.target_rows {
            return bad(format!(
                "k * prod(p) does not equal m = {}",
                self.target_rows
            ));
        }
        if self.bases.iter().any(|b| b.p() < self.k) {
            return bad(format!("k = {} exceeds a base block count", self.k));
        }
        Ok(())
    }

    pub fn max_degree(&self) -> u32 {
        self.bases.iter().map(|b| b.r()).max().unwrap_or(0)
    }
}

impl fmt::Display for CompositionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let primes: Vec<String> = std::iter::once(self.k as u64)
            .chain(self.bases.iter().map(|b| b.p() as u64))
            .map(|p| p.to_string())
            .collect();
        writeln!(
            f,
            "target rows m = {} = {}",
            self.target_rows,
            primes.join(" x ")
        )?;
        writeln!(f, "retained blocks k = {}", self.k)?;
        for (i, b) in self.bases.iter().enumerate() {
            let p = b.p() as u64;
            writeln!(
                f,
                "base {}: devore p = {}, r = {} ({} x {})",
                i + 1,
                p,
                b.r(),
                p * p,
                p.pow(b.r() + 1)
            )?;
        }
        writeln!(
            f,
            "predicted shape: {} x {}",
            self.predicted_rows, self.predicted_cols
        )?;
        write!(f, "predicted coherence bound: {}", self.predicted_coherence)
    }
}

/// Builds the plan's bases and chains them with the plan's `k`.
pub fn execute_plan(plan: &CompositionPlan) -> Result<BlockBinaryMatrix> {
    plan.check()?;
    let bases = plan
        .bases
        .iter()
        .map(|&b| devore_matrix(b))
        .collect::<Result<Vec<_>>>()?;
    let out = compose_chain(&bases, plan.k)?;
    if out.rows() as u64 != plan.predicted_rows {
        return Err(Error::Verification(format!(
            "plan produced {} rows, expected {}",
            out.rows(),
            plan.predicted_rows
        )));
    }
    if out.cols() as u128 != plan.predicted_cols {
        return Err(Error::Verification(format!(
            "plan produced {} columns, expected {}",
            out.cols(),
            plan.predicted_cols
        )));
    }
    if out.overlap_bound() != plan.max_degree()
        || Ratio::new(out.overlap_bound() as u64, out.k() as u64) != plan.predicted_coherence
    {
        return Err(Error::Verification(format!(
            "declared overlap bound {} disagrees with the plan's coherence bound {}",
            out.overlap_bound(),
            plan.predicted_coherence
        )));
    }
    Ok(out)
}

/// Number of prime factors of `m` counted with multiplicity.
pub fn big_omega(m: u64) -> usize {
    factorize(m).map(|f| f.len()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{density, max_overlap};

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(60).unwrap(), vec![2, 2, 3, 5]);
        assert_eq!(factorize(27).unwrap(), vec![3, 3, 3]);
        assert_eq!(factorize(97).unwrap(), vec![97]);
        assert!(factorize(1).is_err());
        assert!(factorize(0).is_err());
    }

    #[test]
    fn plan_examples() {
        let plan = plan_row_size(8).unwrap();
        assert_eq!(plan.k, 2);
        assert_eq!(
            plan.bases.iter().map(|b| b.p()).collect::<Vec<_>>(),
            vec![2, 2]
        );
        assert_eq!(plan.predicted_cols, 16);
        assert_eq!(plan.predicted_coherence, Ratio::new(1, 2));

        let plan = plan_row_size(27).unwrap();
        assert_eq!(plan.k, 3);
        assert_eq!(
            plan.bases.iter().map(|b| b.p()).collect::<Vec<_>>(),
            vec![3, 3]
        );

        let plan = plan_row_size(60).unwrap();
        assert_eq!(
            plan.bases.iter().map(|b| b.p()).collect::<Vec<_>>(),
            vec![2, 3, 5]
        );
        assert_eq!(plan.predicted_cols, 900);
    }

    #[test]
    fn excluded_sizes() {
        for m in [1u64, 2, 7, 15, 49, 4, 6] {
            let err = plan_row_size(m).unwrap_err();
            assert!(matches!(err, Error::NotCovered(_)), "{m}");
            assert!(err.to_string().contains("different from p, p², pq"));
        }
        assert!(plan_row_size(49)
            .unwrap_err()
            .to_string()
            .contains("devore_matrix"));
        assert!(matches!(plan_row_size(0), Err(Error::Parameter(_))));
    }

    #[test]
    fn degree_bound_checks() {
        // k = 2 leaves no room for r = 2
        assert!(plan_row_size_with_degree(60, 2).is_err());
        let plan = plan_row_size_with_degree(3 * 5 * 7, 2).unwrap();
        assert_eq!(plan.predicted_cols, 125 * 343);
        assert_eq!(plan.predicted_coherence, Ratio::new(2, 3));
    }

    #[test]
    fn execute_small_plans() {
        let m8 = execute_plan(&plan_row_size(8).unwrap()).unwrap();
        assert_eq!((m8.rows(), m8.cols()), (8, 16));
        assert_eq!(density(&m8), Ratio::new(1, 4));
        assert!(max_overlap(&m8).unwrap() <= 1);

        let m60 = execute_plan(&plan_row_size(60).unwrap()).unwrap();
        assert_eq!((m60.rows(), m60.cols()), (60, 900));
        assert_eq!(max_overlap(&m60).unwrap(), 1);
    }

    #[test]
    fn malformed_plan_rejected() {
        let mut plan = plan_row_size(60).unwrap();
        plan.k = 3;
        assert!(execute_plan(&plan).is_err());
        let mut plan = plan_row_size(8).unwrap();
        plan.bases.pop();
        assert!(execute_plan(&plan).is_err());
    }

    #[test]
    fn display_lists_bases() {
        let text = plan_row_size(60).unwrap().to_string();
        assert!(text.contains("60 = 2 x 2 x 3 x 5"));
        assert!(text.contains("predicted shape: 60 x 900"));
    }
}
