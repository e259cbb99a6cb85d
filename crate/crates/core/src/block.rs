//! Block matrices and their support tuples.
//!
//! A block binary matrix has `k` row blocks of `n` rows each and exactly one
//! 1 per block in every column, so a column is fully described by the
//! k-tuple of within-block positions. Tuples are the canonical storage;
//! dense and sparse forms are derived on demand.
//!
//! Tuple entries are 1-based (`1..=n`). Column indices in this API are
//! 0-based slice positions.

use std::collections::HashMap;

use crate::analysis;
use crate::error::{Error, Result};
use crate::sparse::{SensingMatrix, SparseColumns};

/// An ordered list of k-tuples over `{1..n}`, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportTupleSet {
    n: u32,
    k: u32,
    entries: Vec<u32>,
}

impl SupportTupleSet {
    pub fn new(n: u32, k: u32, tuples: Vec<Vec<u32>>) -> Result<Self> {
        check_shape(n, k)?;
        let mut entries = Vec::with_capacity(tuples.len() * k as usize);
        for (j, t) in tuples.into_iter().enumerate() {
            if t.len() != k as usize {
                return Err(Error::malformed(format!(
                    "tuple {} has {} entries, expected {k}",
                    j + 1,
                    t.len()
                )));
            }
            entries.extend(t);
        }
        Self::from_flat(n, k, entries)
    }

    /// Builds a set from `M * k` entries laid out tuple after tuple.
    pub fn from_flat(n: u32, k: u32, entries: Vec<u32>) -> Result<Self> {
        check_shape(n, k)?;
        if !entries.len().is_multiple_of(k as usize) {
            return Err(Error::malformed(format!(
                "{} entries do not split into {k}-tuples",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&a| a == 0 || a > n) {
            return Err(Error::Range {
                what: "tuple entry",
                value: bad as u64,
                min: 1,
                max: n as u64,
            });
        }
        Ok(SupportTupleSet { n, k, entries })
    }

    pub(crate) fn from_flat_unchecked(n: u32, k: u32, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&a| a >= 1 && a <= n));
        debug_assert_eq!(entries.len() % k as usize, 0);
        SupportTupleSet { n, k, entries }
    }

    /// Alphabet size, i.e. the block size.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Tuple length, i.e. the number of blocks.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len() / self.k as usize
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tuple(&self, j: usize) -> &[u32] {
        let k = self.k as usize;
        &self.entries[j * k..(j + 1) * k]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u32> {
        self.entries.chunks_exact(self.k as usize)
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.entries
    }

    pub fn to_vecs(&self) -> Vec<Vec<u32>> {
        self.iter().map(<[u32]>::to_vec).collect()
    }

    /// First pair of equal tuples, as `(earlier, later)` indices.
    pub fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<&[u32], usize> = HashMap::with_capacity(self.len());
        for (j, t) in self.iter().enumerate() {
            if let Some(&i) = seen.get(t) {
                return Some((i, j));
            }
            seen.insert(t, j);
        }
        None
    }

    /// Keeps the first `k_new` entries of every tuple.
    pub fn truncate(&self, k_new: u32) -> Result<Self> {
        if k_new == 0 || k_new > self.k {
            return Err(Error::Range {
                what: "retained block count",
                value: k_new as u64,
                min: 1,
                max: self.k as u64,
            });
        }
        let keep = k_new as usize;
        let entries = self
            .iter()
            .flat_map(|t| t[..keep].iter().copied())
            .collect();
        Ok(SupportTupleSet::from_flat_unchecked(self.n, k_new, entries))
    }
}

fn check_shape(n: u32, k: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::param("block size n must be positive"));
    }
    if k == 0 {
        return Err(Error::param("block count k must be positive"));
    }
    Ok(())
}

/// A binary matrix of `k` row blocks of size `n`, one 1 per block per column,
/// with pairwise-distinct columns and a declared overlap bound `r`.
///
/// The declared bound is metadata: constructors may set it from theory, and
/// [`BlockBinaryMatrix::verify`] re-checks it by brute force.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockBinaryMatrix {
    tuples: SupportTupleSet,
    overlap_bound: u32,
}

impl BlockBinaryMatrix {
    pub fn new(tuples: SupportTupleSet, overlap_bound: u32) -> Result<Self> {
        if let Some((first, second)) = tuples.first_duplicate() {
            return Err(Error::DuplicateColumn { first, second });
        }
        Ok(BlockBinaryMatrix {
            tuples,
            overlap_bound,
        })
    }

    pub(crate) fn new_unchecked(tuples: SupportTupleSet, overlap_bound: u32) -> Self {
        BlockBinaryMatrix {
            tuples,
            overlap_bound,
        }
    }

    /// Like [`BlockBinaryMatrix::new`] but computes the overlap bound by
    /// brute force. A single column has overlap bound 0.
    pub fn with_computed_bound(tuples: SupportTupleSet) -> Result<Self> {
        let mut m = Self::new(tuples, 0)?;
        m.overlap_bound = if m.cols() < 2 {
            0
        } else {
            analysis::max_overlap(&m)? as u32
        };
        Ok(m)
    }

    /// Recovers the tuples of a binary matrix whose rows split into `k`
    /// blocks of `n`.
    pub fn from_sparse(
        n: u32,
        k: u32,
        matrix: &SparseColumns,
        overlap_bound: Option<u32>,
    ) -> Result<Self> {
        let tuples = tuples_from_binary(n, k, matrix)?;
        match overlap_bound {
            Some(r) => Self::new(tuples, r),
            None => Self::with_computed_bound(tuples),
        }
    }

    pub fn n(&self) -> u32 {
        self.tuples.n
    }

    pub fn k(&self) -> u32 {
        self.tuples.k
    }

    pub fn overlap_bound(&self) -> u32 {
        self.overlap_bound
    }

    pub fn tuples(&self) -> &SupportTupleSet {
        &self.tuples
    }

    pub fn tuple(&self, j: usize) -> &[u32] {
        self.tuples.tuple(j)
    }

    /// 1-based dense row indices of the ones in column `j`.
    pub fn column_support(&self, j: usize) -> Vec<u32> {
        let n = self.n();
        self.tuple(j)
            .iter()
            .enumerate()
            .map(|(l, &a)| l as u32 * n + a)
            .collect()
    }

    /// Brute-force check of the declared overlap bound. Returns the observed
    /// maximum overlap.
    pub fn verify(&self) -> Result<u64> {
        if self.cols() < 2 {
            return Ok(0);
        }
        let observed = analysis::max_overlap(self)?;
        if observed > self.overlap_bound as u64 {
            return Err(Error::Verification(format!(
                "observed overlap {observed} exceeds declared bound {}",
                self.overlap_bound
            )));
        }
        Ok(observed)
    }
}

impl SensingMatrix for BlockBinaryMatrix {
    fn rows(&self) -> usize {
        self.n() as usize * self.k() as usize
    }

    fn cols(&self) -> usize {
        self.tuples.len()
    }

    fn column_weight(&self, _j: usize) -> usize {
        self.k() as usize
    }

    fn inner(&self, i: usize, j: usize) -> i64 {
        overlap(self.tuple(i), self.tuple(j)) as i64
    }

    fn column_entries(&self, j: usize) -> Vec<(u32, i8)> {
        self.column_support(j).into_iter().map(|r| (r, 1)).collect()
    }

    fn nnz(&self) -> usize {
        self.tuples.entries.len()
    }

    fn uniform_weight(&self) -> Option<usize> {
        (self.cols() > 0).then_some(self.k() as usize)
    }
}

#[inline]
pub(crate) fn overlap(a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).filter(|(x, y)| x == y).count() as u32
}

/// A block matrix with entries in {-1, 0, +1}: the block binary support plus
/// one sign per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryBlockMatrix {
    positions: SupportTupleSet,
    signs: Vec<i8>,
}

impl TernaryBlockMatrix {
    pub fn new(positions: SupportTupleSet, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != positions.entries.len() {
            return Err(Error::malformed(format!(
                "{} signs for {} support entries",
                signs.len(),
                positions.entries.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::malformed("signs must be -1 or +1"));
        }
        Ok(TernaryBlockMatrix { positions, signs })
    }

    /// Reads a ternary matrix whose rows split into `k` blocks of `n` with
    /// exactly one nonzero per block.
    pub fn from_sparse(n: u32, k: u32, matrix: &SparseColumns) -> Result<Self> {
        let positions = tuples_from_columns(n, k, matrix)?;
        let signs = (0..matrix.cols())
            .flat_map(|j| matrix.column_values(j).iter().copied())
            .collect();
        Self::new(positions, signs)
    }

    pub fn n(&self) -> u32 {
        self.positions.n
    }

    pub fn k(&self) -> u32 {
        self.positions.k
    }

    pub fn positions(&self) -> &SupportTupleSet {
        &self.positions
    }

    /// Signs of column `j`, one per block.
    pub fn signs(&self, j: usize) -> &[i8] {
        let k = self.k() as usize;
        &self.signs[j * k..(j + 1) * k]
    }

    /// The binary matrix with the same support.
    pub fn support(&self) -> SupportTupleSet {
        self.positions.clone()
    }
}

impl SensingMatrix for TernaryBlockMatrix {
    fn rows(&self) -> usize {
        self.n() as usize * self.k() as usize
    }

    fn cols(&self) -> usize {
        self.positions.len()
    }

    fn column_weight(&self, _j: usize) -> usize {
        self.k() as usize
    }

    fn inner(&self, i: usize, j: usize) -> i64 {
        let (pa, pb) = (self.positions.tuple(i), self.positions.tuple(j));
        let (sa, sb) = (self.signs(i), self.signs(j));
        (0..pa.len())
            .filter(|&l| pa[l] == pb[l])
            .map(|l| sa[l] as i64 * sb[l] as i64)
            .sum()
    }

    fn column_entries(&self, j: usize) -> Vec<(u32, i8)> {
        let n = self.n();
        self.positions
            .tuple(j)
            .iter()
            .zip(self.signs(j))
            .enumerate()
            .map(|(l, (&a, &s))| (l as u32 * n + a, s))
            .collect()
    }

    fn nnz(&self) -> usize {
        self.signs.len()
    }

    fn uniform_weight(&self) -> Option<usize> {
        (self.cols() > 0).then_some(self.k() as usize)
    }
}

/// Within-block positions of a column's support, given its 1-based dense
/// row indices. Fails unless every block holds exactly one entry.
pub fn tuple_from_support(n: u32, k: u32, support: &[u32]) -> Result<Vec<u32>> {
    check_shape(n, k)?;
    let rows = n as u64 * k as u64;
    let mut tuple = vec![0u32; k as usize];
    for &row in support {
        if row == 0 || row as u64 > rows {
            return Err(Error::Range {
                what: "row index",
                value: row as u64,
                min: 1,
                max: rows,
            });
        }
        let block = ((row - 1) / n) as usize;
        if tuple[block] != 0 {
            return Err(Error::malformed(format!(
                "block {} holds more than one nonzero",
                block + 1
            )));
        }
        tuple[block] = (row - 1) % n + 1;
    }
    if let Some(l) = tuple.iter().position(|&a| a == 0) {
        return Err(Error::malformed(format!(
            "block {} holds no nonzero",
            l + 1
        )));
    }
    Ok(tuple)
}

fn tuples_from_columns(n: u32, k: u32, matrix: &SparseColumns) -> Result<SupportTupleSet> {
    if matrix.rows() != n as usize * k as usize {
        return Err(Error::malformed(format!(
            "{} rows cannot split into {k} blocks of {n}",
            matrix.rows()
        )));
    }
    let mut entries = Vec::with_capacity(matrix.cols() * k as usize);
    for j in 0..matrix.cols() {
        let t = tuple_from_support(n, k, matrix.column_rows(j))
            .map_err(|e| Error::malformed(format!("column {}: {e}", j + 1)))?;
        entries.extend(t);
    }
    Ok(SupportTupleSet::from_flat_unchecked(n, k, entries))
}

/// Support tuples of a binary block matrix given as sparse columns.
pub fn tuples_from_binary(n: u32, k: u32, matrix: &SparseColumns) -> Result<SupportTupleSet> {
    if !matrix.is_binary() {
        return Err(Error::malformed("matrix is not binary"));
    }
    tuples_from_columns(n, k, matrix)
}

/// The support tuples of a block binary matrix.
pub fn matrix_to_tuples(m: &BlockBinaryMatrix) -> SupportTupleSet {
    m.tuples.clone()
}

/// The block binary matrix described by `s`. The overlap bound is computed
/// by brute force unless supplied.
pub fn tuples_to_matrix(
    s: SupportTupleSet,
    overlap_bound: Option<u32>,
) -> Result<BlockBinaryMatrix> {
    match overlap_bound {
        Some(r) => BlockBinaryMatrix::new(s, r),
        None => BlockBinaryMatrix::with_computed_bound(s),
    }
}

/// Keeps the first `k_new` blocks of every column.
///
/// Truncation can make two columns equal; that is an error unless `dedup` is
/// set, in which case later copies are dropped.
pub fn truncate_blocks(
    m: &BlockBinaryMatrix,
    k_new: u32,
    dedup: bool,
) -> Result<BlockBinaryMatrix> {
    let cut = m.tuples.truncate(k_new)?;
    let tuples = if dedup {
        let mut seen = std::collections::HashSet::with_capacity(cut.len());
        let keep: Vec<u32> = cut
            .iter()
            .filter(|t| seen.insert(*t))
            .flat_map(|t| t.iter().copied())
            .collect();
        SupportTupleSet::from_flat_unchecked(cut.n, cut.k, keep)
    } else {
        cut
    };
    BlockBinaryMatrix::new(tuples, m.overlap_bound.min(k_new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: u32, k: u32, t: &[&[u32]]) -> SupportTupleSet {
        SupportTupleSet::new(n, k, t.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn support_to_tuple_worked_column() {
        assert_eq!(tuple_from_support(3, 3, &[1, 5, 9]).unwrap(), vec![1, 2, 3]);
        assert_eq!(tuple_from_support(1, 3, &[1, 2, 3]).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn support_to_tuple_rejects_bad_blocks() {
        assert!(matches!(
            tuple_from_support(3, 3, &[1, 2, 9]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(matches!(
            tuple_from_support(3, 3, &[1, 9]),
            Err(Error::MalformedMatrix(_))
        ));
        assert!(matches!(
            tuple_from_support(3, 3, &[1, 5, 10]),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn small_psi_to_tuples() {
        // columns of the 4x4 two-block example, read off the dense layout
        let dense = [[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]];
        let cols = (0..4)
            .map(|j| {
                (0..4)
                    .filter(|&i| dense[i][j] == 1)
                    .map(|i| (i as u32 + 1, 1i8))
                    .collect()
            })
            .collect();
        let sparse = SparseColumns::from_columns(4, cols).unwrap();
        let m = BlockBinaryMatrix::from_sparse(2, 2, &sparse, None).unwrap();
        assert_eq!(
            matrix_to_tuples(&m).to_vecs(),
            vec![vec![1, 1], vec![2, 2], vec![1, 2], vec![2, 1]]
        );
        assert_eq!(m.overlap_bound(), 1);
    }

    #[test]
    fn tuple_to_dense_rows() {
        let m = tuples_to_matrix(set(6, 2, &[&[1, 1]]), None).unwrap();
        assert_eq!(m.column_support(0), vec![1, 7]);
        let m = tuples_to_matrix(set(3, 3, &[&[2, 3, 1]]), None).unwrap();
        assert_eq!(m.column_support(0), vec![2, 6, 7]);
    }

    #[test]
    fn tuples_to_matrix_errors() {
        assert!(matches!(
            SupportTupleSet::new(3, 2, vec![vec![1, 4]]),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            tuples_to_matrix(set(3, 2, &[&[1, 2], &[1, 2]]), None),
            Err(Error::DuplicateColumn {
                first: 0,
                second: 1
            })
        ));
    }

    #[test]
    fn truncate_identity_and_errors() {
        let m = tuples_to_matrix(set(3, 3, &[&[1, 2, 3], &[2, 2, 1]]), None).unwrap();
        assert_eq!(truncate_blocks(&m, 3, false).unwrap(), m);
        assert!(matches!(
            truncate_blocks(&m, 4, false),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            truncate_blocks(&m, 0, false),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            truncate_blocks(&m, 1, true).map(|t| t.cols()),
            Ok(2)
        ));
        let dup = tuples_to_matrix(set(3, 3, &[&[1, 2, 3], &[1, 2, 1]]), None).unwrap();
        assert!(matches!(
            truncate_blocks(&dup, 2, false),
            Err(Error::DuplicateColumn { .. })
        ));
        assert_eq!(truncate_blocks(&dup, 2, true).unwrap().cols(), 1);
    }

    #[test]
    fn ternary_inner_uses_signs() {
        let pos = set(2, 2, &[&[1, 1], &[1, 2]]);
        let t = TernaryBlockMatrix::new(pos, vec![1, -1, -1, 1]).unwrap();
        assert_eq!(t.inner(0, 1), -1);
        assert_eq!(t.column_entries(0), vec![(1, 1), (3, -1)]);
    }

    fn tuple_sets() -> impl Strategy<Value = SupportTupleSet> {
        (1u32..=7, 1u32..=7)
            .prop_flat_map(|(n, k)| {
                let tuple = proptest::collection::vec(1..=n, k as usize);
                (Just(n), Just(k), proptest::collection::vec(tuple, 1..50))
            })
            .prop_map(|(n, k, mut tuples)| {
                let mut seen = std::collections::HashSet::new();
                tuples.retain(|t| seen.insert(t.clone()));
                SupportTupleSet::new(n, k, tuples).unwrap()
            })
    }

    proptest! {
        #[test]
        fn sparse_round_trip(s in tuple_sets()) {
            let m = tuples_to_matrix(s.clone(), None).unwrap();
            let back = BlockBinaryMatrix::from_sparse(s.n(), s.k(), &m.to_sparse(), None).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(matrix_to_tuples(&back), s);
            prop_assert!(m.to_dense().iter().all(|row| row.len() == m.cols()));
            prop_assert_eq!(m.to_dense().len(), (m.n() * m.k()) as usize);
            for j in 0..m.cols() {
                let ones = m.to_dense().iter().filter(|row| row[j] == 1).count();
                prop_assert_eq!(ones, m.k() as usize);
            }
        }

        #[test]
        fn truncation_never_increases_overlap(s in tuple_sets(), cut in 1u32..=7) {
            let m = tuples_to_matrix(s, None).unwrap();
            let k_new = cut.min(m.k());
            let t = truncate_blocks(&m, k_new, true).unwrap();
            if t.cols() >= 2 {
                prop_assert!(analysis::max_overlap(&t).unwrap() <= m.overlap_bound() as u64);
            }
        }
    }
}
