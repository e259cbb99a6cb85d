//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The oracles work from dense columns (row/value lists) and never touch
//! support tuples, so they stay independent of the tuple-based code paths
//! they check.

#![allow(dead_code)]

use std::path::PathBuf;

use blockcs::{
    compose, devore_matrix, BlockBinaryMatrix, ComposeParams, DevoreParams, SensingMatrix,
};
use rayon::prelude::*;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// Row-major 0/1 matrix transcribed from a whitespace-separated text file.
pub fn read_dense_fixture(name: &str) -> Vec<Vec<i8>> {
    std::fs::read_to_string(fixture_path(name))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect()
}

pub fn devore(p: u32, r: u32) -> BlockBinaryMatrix {
    devore_matrix(DevoreParams::new(p, r).unwrap()).unwrap()
}

/// The 12 x 36 worked example.
pub fn worked_phi() -> BlockBinaryMatrix {
    compose(&devore(2, 1), &devore(3, 1), ComposeParams::new(2)).unwrap()
}

pub fn tuples(list: &[&[u32]]) -> Vec<Vec<u32>> {
    list.iter().map(|t| t.to_vec()).collect()
}

pub const PRINTED_S: &[&[u32]] = &[&[1, 1], &[2, 2], &[1, 2], &[2, 1]];

pub const PRINTED_S_PRIME: &[&[u32]] = &[
    &[1, 1, 1],
    &[2, 2, 2],
    &[3, 3, 3],
    &[1, 2, 3],
    &[2, 3, 1],
    &[3, 1, 2],
    &[1, 3, 2],
    &[2, 1, 3],
    &[3, 2, 1],
];

pub const PRINTED_S_DOUBLE_PRIME: &[&[u32]] = &[
    &[1, 1],
    &[2, 2],
    &[3, 3],
    &[1, 2],
    &[2, 3],
    &[3, 1],
    &[1, 3],
    &[2, 1],
    &[3, 2],
];

#[rustfmt::skip]
pub const PRINTED_S_TRIPLE_PRIME: &[&[u32]] = &[
    &[1, 1], &[4, 4], &[1, 4], &[4, 1],
    &[2, 2], &[5, 5], &[2, 5], &[5, 2],
    &[3, 3], &[6, 6], &[3, 6], &[6, 3],
    &[1, 2], &[4, 5], &[1, 5], &[4, 2],
    &[2, 3], &[5, 6], &[2, 6], &[5, 3],
    &[3, 1], &[6, 4], &[3, 4], &[6, 1],
    &[1, 3], &[4, 6], &[1, 6], &[4, 3],
    &[2, 1], &[5, 4], &[2, 4], &[5, 1],
    &[3, 2], &[6, 5], &[3, 5], &[6, 2],
];

/// Columns of a dense row-major matrix as sorted `(row, value)` lists.
pub fn dense_to_columns(dense: &[Vec<i8>]) -> Vec<Vec<(u32, i8)>> {
    let cols = dense.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            dense
                .iter()
                .enumerate()
                .filter(|(_, row)| row[j] != 0)
                .map(|(i, row)| (i as u32 + 1, row[j]))
                .collect()
        })
        .collect()
}

/// Columns of any matrix, materialized through its dense form.
pub fn columns_of<M: SensingMatrix + ?Sized>(m: &M) -> Vec<Vec<(u32, i8)>> {
    (0..m.cols())
        .map(|j| {
            let mut col = m.column_entries(j);
            col.sort_unstable();
            col
        })
        .collect()
}

pub fn dot(a: &[(u32, i8)], b: &[(u32, i8)]) -> i64 {
    let (mut i, mut j, mut acc) = (0, 0, 0i64);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 as i64 * b[j].1 as i64;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Largest `|<c_i, c_j>|` over all distinct pairs.
pub fn brute_max_abs_inner(cols: &[Vec<(u32, i8)>]) -> u64 {
    (0..cols.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..cols.len())
                .map(|j| dot(&cols[i], &cols[j]).unsigned_abs())
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// True when no two columns are equal.
pub fn all_distinct(cols: &[Vec<(u32, i8)>]) -> bool {
    let mut sorted: Vec<&Vec<(u32, i8)>> = cols.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Runs a criterion body, prints one PASS/FAIL line and panics on failure.
pub fn report(id: &str, title: &str, failures: Vec<String>, elapsed: std::time::Duration) {
    if failures.is_empty() {
        println!("[PASS] {id} {title} ({:.2?})", elapsed);
    } else {
        println!("[FAIL] {id} {title} ({:.2?})", elapsed);
        for f in &failures {
            println!("       - {f}");
        }
        panic!("{id} failed: {} problem(s)", failures.len());
    }
}
