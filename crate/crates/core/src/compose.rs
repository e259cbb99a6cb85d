//! Fusing two block binary matrices into a sparser one.
//!
//! Given `psi` (block size `n`, tuples `S_i`) and `psi_prime` (block size
//! `n'`, tuples `S'_j`), both cut to their first `k` blocks, the output has
//! block size `n n'`, `k` blocks and one column per pair `(i, j)` with tuple
//!
//! ```text
//! S'_j[l] + n' * (S_i[l] - 1),    l = 1..k
//! ```
//!
//! Two output entries in the same block coincide only when both parent
//! entries coincide, so the overlap of the output is at most `max(r, r')`
//! and its coherence at most `max(r, r') / k`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::{BlockBinaryMatrix, SupportTupleSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeParams {
    pub k: u32,
}

impl ComposeParams {
    pub fn new(k: u32) -> Self {
        ComposeParams { k }
    }

    fn check(&self, inputs: &[&BlockBinaryMatrix]) -> Result<()> {
        let k = self.k;
        if k == 0 {
            return Err(Error::param("k must be positive"));
        }
        let min_blocks = inputs.iter().map(|m| m.k()).min().unwrap_or(0);
        if k > min_blocks {
            return Err(Error::param(format!(
                "k = {k} exceeds the smallest input block count {min_blocks}"
            )));
        }
        let max_r = inputs.iter().map(|m| m.overlap_bound()).max().unwrap_or(0);
        if max_r > k {
            return Err(Error::param(format!(
                "overlap bound {max_r} exceeds k = {k}; coherence bound would exceed 1"
            )));
        }
        Ok(())
    }
}

/// Non-fatal observations about a composition's parameters.
pub fn compose_warnings(psi: &BlockBinaryMatrix, params: ComposeParams) -> Vec<String> {
    let mut warnings = Vec::new();
    if params.k > psi.n() {
        warnings.push(format!(
            "k = {} exceeds the first input's block size n = {}",
            params.k,
            psi.n()
        ));
    }
    warnings
}

/// Composes `psi` and `psi_prime` keeping `params.k` blocks.
///
/// Output column `j * M + i` comes from column `i` of `psi` and column `j`
/// of `psi_prime`. Fails with a duplicate-column error if cutting either
/// input to `k` blocks makes two of its columns equal.
pub fn compose(
    psi: &BlockBinaryMatrix,
    psi_prime: &BlockBinaryMatrix,
    params: ComposeParams,
) -> Result<BlockBinaryMatrix> {
    params.check(&[psi, psi_prime])?;
    let k = params.k;
    let outer = psi.tuples().truncate(k)?;
    let inner = psi_prime.tuples().truncate(k)?;
    for cut in [&outer, &inner] {
        if let Some((first, second)) = cut.first_duplicate() {
            return Err(Error::DuplicateColumn { first, second });
        }
    }

    let n_prime = psi_prime.n();
    let n_out = psi
        .n()
        .checked_mul(n_prime)
        .ok_or_else(|| Error::param("block size n * n' overflows"))?;
    let m = outer.len();
    let kk = k as usize;
    let block_len = m * kk;
    let total = block_len
        .checked_mul(inner.len())
        .ok_or_else(|| Error::param("column count M * M' overflows"))?;

    let mut entries = vec![0u32; total];
    entries
        .par_chunks_mut(block_len)
        .zip(inner.as_flat().par_chunks(kk))
        .for_each(|(chunk, b)| {
            for (dst, a) in chunk.chunks_exact_mut(kk).zip(outer.iter()) {
                for l in 0..kk {
                    dst[l] = b[l] + n_prime * (a[l] - 1);
                }
            }
        });

    let tuples = SupportTupleSet::from_flat_unchecked(n_out, k, entries);
    let bound = psi.overlap_bound().max(psi_prime.overlap_bound());
    Ok(BlockBinaryMatrix::new_unchecked(tuples, bound))
}

/// Left fold of [`compose`] over `matrices` with the same `k` at every step.
pub fn compose_chain(matrices: &[BlockBinaryMatrix], k: u32) -> Result<BlockBinaryMatrix> {
    if matrices.len() < 2 {
        return Err(Error::param(format!(
            "a composition chain needs at least two matrices, got {}",
            matrices.len()
        )));
    }
    let params = ComposeParams::new(k);
    params.check(&matrices.iter().collect::<Vec<_>>())?;
    let mut acc = compose(&matrices[0], &matrices[1], params)?;
    for next in &matrices[2..] {
        acc = compose(&acc, next, params)?;
    }
    Ok(acc)
}

/// Row count of the composed matrix: `n n' k`.
pub fn composed_rows(psi: &BlockBinaryMatrix, psi_prime: &BlockBinaryMatrix, k: u32) -> usize {
    psi.n() as usize * psi_prime.n() as usize * k as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::max_overlap;
    use crate::devore::{devore_matrix, DevoreParams};
    use crate::sparse::SensingMatrix;

    fn devore(p: u32, r: u32) -> BlockBinaryMatrix {
        devore_matrix(DevoreParams::new(p, r).unwrap()).unwrap()
    }

    #[test]
    fn worked_example_head() {
        let phi = compose(&devore(2, 1), &devore(3, 1), ComposeParams::new(2)).unwrap();
        assert_eq!(phi.cols(), 36);
        assert_eq!(phi.n(), 6);
        assert_eq!(phi.rows(), 12);
        let head: Vec<Vec<u32>> = (0..4).map(|j| phi.tuple(j).to_vec()).collect();
        assert_eq!(head, vec![vec![1, 1], vec![4, 4], vec![1, 4], vec![4, 1]]);
        assert!(phi.tuples().as_flat().iter().all(|&a| (1..=6).contains(&a)));
    }

    #[test]
    fn trivial_partner_is_identity() {
        let m = devore(3, 1);
        let one =
            BlockBinaryMatrix::new(SupportTupleSet::new(1, 3, vec![vec![1, 1, 1]]).unwrap(), 0)
                .unwrap();
        let out = compose(&m, &one, ComposeParams::new(3)).unwrap();
        assert_eq!(out.tuples(), m.tuples());
    }

    #[test]
    fn precondition_errors() {
        let a = devore(2, 1);
        let b = devore(3, 1);
        assert!(matches!(
            compose(&a, &b, ComposeParams::new(5)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            compose(&a, &b, ComposeParams::new(0)),
            Err(Error::Parameter(_))
        ));
        let c = devore(5, 2);
        assert!(matches!(
            compose(&b, &c, ComposeParams::new(1)),
            Err(Error::Parameter(_))
        ));
        // k = r collapses polynomial graphs that agree on the first r points
        assert!(matches!(
            compose(&a, &b, ComposeParams::new(1)),
            Err(Error::DuplicateColumn { .. })
        ));
    }

    #[test]
    fn chain_shapes() {
        assert!(compose_chain(&[devore(2, 1)], 2).is_err());
        assert!(compose_chain(&[], 2).is_err());
        let pair = compose_chain(&[devore(2, 1), devore(3, 1)], 2).unwrap();
        assert_eq!(
            pair,
            compose(&devore(2, 1), &devore(3, 1), ComposeParams::new(2)).unwrap()
        );

        let chain = compose_chain(&[devore(2, 1), devore(3, 1), devore(5, 1)], 2).unwrap();
        assert_eq!((chain.rows(), chain.cols()), (60, 900));
        assert_eq!(chain.overlap_bound(), 1);
        assert_eq!(max_overlap(&chain).unwrap(), 1);
        assert!(chain.tuples().first_duplicate().is_none());
    }

    #[test]
    fn two_prime_family_shape() {
        // p = 3 < q = 5, r = 1, k = p
        let out = compose(&devore(3, 1), &devore(5, 1), ComposeParams::new(3)).unwrap();
        assert_eq!((out.rows(), out.cols()), (3 * 3 * 5, 15usize.pow(2)));
        assert!(max_overlap(&out).unwrap() <= 1);
    }

    #[test]
    fn k_above_block_size_warns() {
        let w = compose_warnings(&devore(2, 1), ComposeParams::new(3));
        assert_eq!(w.len(), 1);
        assert!(compose_warnings(&devore(3, 1), ComposeParams::new(2)).is_empty());
    }
}
