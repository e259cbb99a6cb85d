mod common;

use blockcs::analysis::{coherence, density, rip_constant};
use blockcs::{
    compose, hadamard_expand, sign_flip, BlockBinaryMatrix, ComposeParams, SensingMatrix,
    SupportTupleSet,
};
use common::*;
use num_rational::Ratio;
use proptest::prelude::*;

/// A random block binary matrix with distinct tuples, its bound computed by
/// brute force.
fn block_matrix(max_n: u32, k: u32) -> impl Strategy<Value = BlockBinaryMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::btree_set(prop::collection::vec(1..=n, k as usize), 1..12).prop_map(
            move |set| {
                let tuples = SupportTupleSet::new(n, k, set.into_iter().collect()).unwrap();
                BlockBinaryMatrix::with_computed_bound(tuples).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_overlap_and_density(
        a in block_matrix(4, 4),
        b in block_matrix(4, 4),
        k in 1u32..=4,
    ) {
        match compose(&a, &b, ComposeParams::new(k)) {
            Ok(c) => {
                let cols = columns_of(&c);
                prop_assert_eq!(cols.len(), a.cols() * b.cols());
                prop_assert!(brute_max_abs_inner(&cols) <= a.overlap_bound().max(b.overlap_bound()) as u64);
                prop_assert!(all_distinct(&cols));
                prop_assert_eq!(density(&c), Ratio::new(1, (a.n() * b.n()) as u64));
                prop_assert_eq!(c.rows(), (a.n() * b.n() * k) as usize);
            }
            Err(_) => {
                let bound = a.overlap_bound().max(b.overlap_bound());
                let collapses = a.tuples().truncate(k).unwrap().first_duplicate().is_some()
                    || b.tuples().truncate(k).unwrap().first_duplicate().is_some();
                prop_assert!(bound > k || collapses);
            }
        }
    }

    #[test]
    fn sign_flip_keeps_magnitudes(m in block_matrix(5, 3)) {
        let a = columns_of(&m);
        let b = columns_of(&sign_flip(&m));
        for i in 0..a.len() {
            prop_assert_eq!(a[i].iter().map(|e| e.0).collect::<Vec<_>>(), b[i].iter().map(|e| e.0).collect::<Vec<_>>());
            for j in i + 1..a.len() {
                prop_assert_eq!(dot(&a[i], &a[j]).abs(), dot(&b[i], &b[j]).abs());
            }
        }
    }

    #[test]
    fn hadamard_bounds(m in block_matrix(5, 4), r_prime in 0usize..=4) {
        let r = m.overlap_bound() as i64;
        let spawn = m.k() as usize + r_prime;
        match hadamard_expand(&m, r_prime) {
            Ok(h) => {
                prop_assert!(spawn.is_power_of_two());
                let cols = columns_of(&h);
                for i in 0..cols.len() {
                    for j in i + 1..cols.len() {
                        let ip = dot(&cols[i], &cols[j]);
                        if i / spawn == j / spawn {
                            prop_assert!(ip.abs() <= r_prime as i64);
                        } else {
                            prop_assert!(ip.abs() <= r);
                        }
                    }
                }
            }
            Err(_) => prop_assert!(!spawn.is_power_of_two() || r_prime > r as usize),
        }
    }

    #[test]
    fn rip_is_affine_in_order(m in block_matrix(4, 3), s in 1u64..8) {
        prop_assume!(m.cols() >= 2);
        let mu = coherence(&m).unwrap();
        let rip = rip_constant(&m, s).unwrap();
        prop_assert_eq!(rip.delta, mu * Ratio::from_integer(s - 1));
        prop_assert_eq!(mu, Ratio::new(brute_max_abs_inner(&columns_of(&m)), m.k() as u64));
    }
}
