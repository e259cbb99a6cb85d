//! Polynomial-graph binary matrices over the prime field Z_p.
//!
//! Each polynomial of degree at most `r` contributes one column: block `l`
//! holds a single 1 at position `P(l - 1) + 1`. Two distinct polynomials
//! agree on at most `r` points, so the overlap bound is `r`.

use serde::{Deserialize, Serialize};

use crate::block::{BlockBinaryMatrix, SupportTupleSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevoreParams {
    p: u32,
    r: u32,
}

impl DevoreParams {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::param(format!("p must be prime (got {p})")));
        }
        if r >= p {
            return Err(Error::param(format!(
                "degree bound r must be smaller than p (got r = {r}, p = {p})"
            )));
        }
        Ok(DevoreParams { p, r })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `p^(r+1)`, or `None` on overflow.
    pub fn column_count(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.r + 1)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Horner evaluation of `coeffs[0] + coeffs[1] x + ...` modulo `p`.
pub fn eval_poly(coeffs: &[u32], x: u32, p: u32) -> Result<u32> {
    let range = |what, value: u32| Error::Range {
        what,
        value: value as u64,
        min: 0,
        max: p.saturating_sub(1) as u64,
    };
    if x >= p {
        return Err(range("evaluation point", x));
    }
    if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
        return Err(range("coefficient", c));
    }
    let (x, p) = (x as u64, p as u64);
    let v = coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| (acc * x + c as u64) % p);
    Ok(v as u32)
}

/// The `p^2 x p^(r+1)` polynomial-graph matrix.
///
/// Columns run over coefficient vectors `(a_r, ..., a_1, a_0)` in
/// lexicographic order, `a_r` varying slowest.
pub fn devore_matrix(params: DevoreParams) -> Result<BlockBinaryMatrix> {
    let p = params.p;
    let cols = params
        .column_count()
        .and_then(|c| usize::try_from(c).ok())
        .and_then(|c| c.checked_mul(p as usize).map(|_| c))
        .ok_or_else(|| {
            Error::param(format!(
                "p^(r+1) columns overflow for p = {p}, r = {}",
                params.r
            ))
        })?;

    let degree = params.r as usize + 1;
    let mut coeffs = vec![0u32; degree];
    let mut entries = Vec::with_capacity(cols * p as usize);
    for c in 0..cols {
        // a_i is digit i of c in base p, a_0 least significant
        let mut rest = c;
        for a in coeffs.iter_mut() {
            *a = (rest % p as usize) as u32;
            rest /= p as usize;
        }
        for x in 0..p {
            entries.push(eval_poly(&coeffs, x, p)? + 1);
        }
    }
    let tuples = SupportTupleSet::from_flat(p, p, entries)?;
    Ok(BlockBinaryMatrix::new_unchecked(tuples, params.r))
}
