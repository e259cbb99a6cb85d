//! Matrix files: a Matrix Market coordinate payload plus a JSON sidecar.
//!
//! The payload for `name.mtx` is
//!
//! ```text
//! %%MatrixMarket matrix coordinate integer general
//! <rows> <cols> <nnz>
//! <row> <col> <value>        (1-based, column-major order)
//! ```
//!
//! and the sidecar `name.meta.json` records how the matrix was built, its
//! block structure, declared overlap bound and density, and SHA-256 digests
//! of the files it was derived from.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::analysis::density;
use crate::block::{BlockBinaryMatrix, TernaryBlockMatrix};
use crate::error::{Error, Result};
use crate::sparse::{SensingMatrix, SparseColumns};
use crate::ternary::HadamardTernaryMatrix;

pub const BANNER: &str = "%%MatrixMarket matrix coordinate integer general";

pub fn ratio_as_string<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio_from_string<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
    let s = String::deserialize(d)?;
    parse_ratio(&s).map_err(serde::de::Error::custom)
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_ratio(s: &str) -> std::result::Result<Ratio<u64>, String> {
    let bad = || format!("invalid rational {s:?}");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Serializes the nonzeros of `m` in column-major order.
pub fn write_matrix_market<M: SensingMatrix + ?Sized>(m: &M) -> String {
    let mut out = String::with_capacity(64 + m.nnz() * 12);
    out.push_str(BANNER);
    out.push('\n');
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for j in 0..m.cols() {
        for (r, v) in m.column_entries(j) {
            let _ = writeln!(out, "{} {} {}", r, j + 1, v);
        }
    }
    out
}

/// Parses a coordinate integer payload. Entries may appear in any order.
pub fn read_matrix_market(text: &str) -> std::result::Result<SparseColumns, String> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or("empty file")?;
    if banner.trim_end() != BANNER {
        return Err(format!("expected banner {BANNER:?}, found {banner:?}"));
    }
    let mut body = lines.filter(|l| !l.trim_start().starts_with('%') && !l.trim().is_empty());
    let size = body.next().ok_or("missing size line")?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad size line {size:?}")))
        .collect::<std::result::Result<_, _>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(format!("size line needs three integers, found {size:?}"));
    };
    let mut columns: Vec<Vec<(u32, i8)>> = vec![Vec::new(); cols];
    let mut seen = 0usize;
    for line in body {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = toks[..] else {
            return Err(format!("entry line needs three fields, found {line:?}"));
        };
        let r: u32 = r
            .parse()
            .map_err(|_| format!("bad row index in {line:?}"))?;
        let c: usize = c
            .parse()
            .map_err(|_| format!("bad column index in {line:?}"))?;
        let v: i8 = v.parse().map_err(|_| format!("bad value in {line:?}"))?;
        if c == 0 || c > cols {
            return Err(format!("column index {c} outside 1..={cols}"));
        }
        if v != 1 && v != -1 {
            return Err(format!("value {v} is not -1 or 1"));
        }
        columns[c - 1].push((r, v));
        seen += 1;
    }
    if seen != nnz {
        return Err(format!("size line announces {nnz} entries, found {seen}"));
    }
    SparseColumns::from_columns(rows, columns).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Devore,
    Compose,
    Signflip,
    Hadamard,
    Plan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixForm {
    BlockBinary,
    BlockTernary,
    HadamardTernary,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_prime: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: Construction,
    /// SHA-256 over the input's payload followed by its sidecar.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: Construction,
    pub form: MatrixForm,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<u32>,
    pub column_weight: usize,
    pub overlap_bound: u64,
    pub rows: usize,
    pub cols: usize,
    #[serde(
        serialize_with = "ratio_as_string",
        deserialize_with = "ratio_from_string"
    )]
    pub density: Ratio<u64>,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Any of the matrix forms this crate builds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyMatrix {
    Binary(BlockBinaryMatrix),
    Ternary(TernaryBlockMatrix),
    Hadamard(HadamardTernaryMatrix),
}

impl AnyMatrix {
    fn inner_ref(&self) -> &dyn SensingMatrix {
        match self {
            AnyMatrix::Binary(m) => m,
            AnyMatrix::Ternary(m) => m,
            AnyMatrix::Hadamard(m) => m,
        }
    }

    pub fn form(&self) -> MatrixForm {
        match self {
            AnyMatrix::Binary(_) => MatrixForm::BlockBinary,
            AnyMatrix::Ternary(_) => MatrixForm::BlockTernary,
            AnyMatrix::Hadamard(_) => MatrixForm::HadamardTernary,
        }
    }

    pub fn as_binary(&self) -> Option<&BlockBinaryMatrix> {
        match self {
            AnyMatrix::Binary(m) => Some(m),
            _ => None,
        }
    }
}

// Dispatch per call; the analysis hot loops go through `inner`, so forward
// it without boxing.
impl SensingMatrix for AnyMatrix {
    fn rows(&self) -> usize {
        self.inner_ref().rows()
    }
    fn cols(&self) -> usize {
        self.inner_ref().cols()
    }
    fn column_weight(&self, j: usize) -> usize {
        self.inner_ref().column_weight(j)
    }
    fn inner(&self, i: usize, j: usize) -> i64 {
        match self {
            AnyMatrix::Binary(m) => m.inner(i, j),
            AnyMatrix::Ternary(m) => m.inner(i, j),
            AnyMatrix::Hadamard(m) => m.inner(i, j),
        }
    }
    fn column_entries(&self, j: usize) -> Vec<(u32, i8)> {
        self.inner_ref().column_entries(j)
    }
    fn nnz(&self) -> usize {
        self.inner_ref().nnz()
    }
    fn uniform_weight(&self) -> Option<usize> {
        self.inner_ref().uniform_weight()
    }
}

/// A matrix together with its sidecar metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub matrix: AnyMatrix,
    pub meta: Metadata,
}

/// `name.mtx` -> `name.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

impl MatrixFile {
    /// Wraps a matrix, filling shape, weight, bound and density from it.
    pub fn new(
        matrix: AnyMatrix,
        kind: Construction,
        params: Params,
        provenance: Vec<Provenance>,
        warnings: Vec<String>,
    ) -> Self {
        let (block_size, blocks, overlap_bound, column_weight) = match &matrix {
            AnyMatrix::Binary(m) => (
                Some(m.n()),
                Some(m.k()),
                m.overlap_bound() as u64,
                m.k() as usize,
            ),
            AnyMatrix::Ternary(m) => (Some(m.n()), Some(m.k()), 0, m.k() as usize),
            AnyMatrix::Hadamard(m) => (None, None, 0, m.weight()),
        };
        let overlap_bound = match (&matrix, params.r) {
            (AnyMatrix::Binary(_), _) => overlap_bound,
            (_, Some(r)) => r as u64,
            (_, None) => overlap_bound,
        };
        let meta = Metadata {
            kind,
            form: matrix.form(),
            params,
            block_size,
            blocks,
            column_weight,
            overlap_bound,
            rows: matrix.rows(),
            cols: matrix.cols(),
            density: density(&matrix),
            provenance,
            warnings,
        };
        MatrixFile { matrix, meta }
    }

    pub fn payload(&self) -> String {
        write_matrix_market(&self.matrix)
    }

    pub fn meta_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.meta).expect("metadata serializes");
        s.push('\n');
        s
    }

    /// Provenance record pointing at this file.
    pub fn provenance(&self) -> Provenance {
        let mut h = Sha256::new();
        h.update(self.payload().as_bytes());
        h.update(self.meta_json().as_bytes());
        Provenance {
            kind: self.meta.kind,
            digest: hex::encode(h.finalize()),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.payload())?;
        fs::write(sidecar_path(path), self.meta_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let payload = fs::read_to_string(path)?;
        let meta_text = fs::read_to_string(sidecar_path(path))?;
        Self::parse(&payload, &meta_text).map_err(|reason| Error::MalformedFile {
            path: path.display().to_string(),
            reason,
        })
    }

    /// Rebuilds a matrix from payload and sidecar text.
    pub fn parse(payload: &str, meta_json: &str) -> std::result::Result<Self, String> {
        let sparse = read_matrix_market(payload)?;
        let meta: Metadata =
            serde_json::from_str(meta_json).map_err(|e| format!("sidecar: {e}"))?;
        if (meta.rows, meta.cols) != (sparse.rows(), sparse.cols()) {
            return Err(format!(
                "sidecar shape {}x{} disagrees with payload {}x{}",
                meta.rows,
                meta.cols,
                sparse.rows(),
                sparse.cols()
            ));
        }
        let blocks = || -> std::result::Result<(u32, u32), String> {
            match (meta.block_size, meta.blocks) {
                (Some(n), Some(k)) => Ok((n, k)),
                _ => Err("block forms need block_size and blocks".into()),
            }
        };
        let matrix = match meta.form {
            MatrixForm::BlockBinary => {
                let (n, k) = blocks()?;
                let bound = u32::try_from(meta.overlap_bound).map_err(|e| e.to_string())?;
                AnyMatrix::Binary(
                    BlockBinaryMatrix::from_sparse(n, k, &sparse, Some(bound))
                        .map_err(|e| e.to_string())?,
                )
            }
            MatrixForm::BlockTernary => {
                let (n, k) = blocks()?;
                AnyMatrix::Ternary(
                    TernaryBlockMatrix::from_sparse(n, k, &sparse).map_err(|e| e.to_string())?,
                )
            }
            MatrixForm::HadamardTernary => {
                let r_prime = meta.params.r_prime.unwrap_or(0) as usize;
                AnyMatrix::Hadamard(
                    HadamardTernaryMatrix::from_sparse(&sparse, meta.column_weight, r_prime)
                        .map_err(|e| e.to_string())?,
                )
            }
        };
        if matrix
            .uniform_weight()
            .is_some_and(|w| w != meta.column_weight)
        {
            return Err(format!(
                "sidecar column weight {} disagrees with payload",
                meta.column_weight
            ));
        }
        Ok(MatrixFile { matrix, meta })
    }
}
