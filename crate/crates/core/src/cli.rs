//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parameter or domain error, 3 malformed input
//! file, 4 verification failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, BRUTE_FORCE_COLUMN_CEILING};
use crate::compose::{compose, compose_warnings, ComposeParams};
use crate::devore::{devore_matrix, DevoreParams};
use crate::error::{Error, Result};
use crate::io::{AnyMatrix, Construction, MatrixFile, Params};
use crate::planner::{execute_plan, plan_row_size_with_degree};
use crate::sparse::SensingMatrix;
use crate::ternary::{hadamard_expand, sign_flip};

#[derive(Debug, Parser)]
#[command(
    name = "blockcs",
    version,
    about = "Deterministic sparse binary and ternary sensing matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TernaryMode {
    Signflip,
    Hadamard,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polynomial-graph matrix of size p^2 x p^(r+1).
    Devore {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compose two block binary matrix files keeping k blocks.
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ternary matrix from a block binary matrix file.
    Ternary {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: TernaryMode,
        /// Extra Hadamard rows r' (hadamard mode only).
        #[arg(long)]
        rprime: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan (and optionally build) a binary matrix with a given row count.
    Plan {
        #[arg(long)]
        rows: u64,
        /// Degree bound used for every base matrix.
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        execute: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the plan as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print an exact analysis report as JSON.
    Analyze {
        input: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Seeded OMP recovery trials.
    Omp {
        input: PathBuf,
        #[arg(long)]
        sparsity: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coefficient tolerance for a trial to count as exact.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        force: bool,
    },
    /// Re-check a file's declared overlap bound, density and structure.
    Verify {
        input: PathBuf,
        #[arg(long)]
        force: bool,
    },
}

fn check_ceiling(m: &impl SensingMatrix, force: bool) -> Result<()> {
    if m.cols() > BRUTE_FORCE_COLUMN_CEILING && !force {
        return Err(Error::param(format!(
            "{} columns exceed the brute-force ceiling of {BRUTE_FORCE_COLUMN_CEILING}; pass --force",
            m.cols()
        )));
    }
    Ok(())
}

fn write_file(file: &MatrixFile, path: &Path, out: &mut dyn Write) -> Result<()> {
    file.write(path)?;
    for w in &file.meta.warnings {
        eprintln!("warning: {w}");
    }
    writeln!(
        out,
        "wrote {} x {} {:?} matrix to {}",
        file.meta.rows,
        file.meta.cols,
        file.meta.form,
        path.display()
    )?;
    Ok(())
}

fn require_binary(file: &MatrixFile, path: &Path) -> Result<crate::block::BlockBinaryMatrix> {
    file.matrix
        .as_binary()
        .cloned()
        .ok_or_else(|| Error::param(format!("{} is not a block binary matrix", path.display())))
}

fn print_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    ok: bool,
    declared_bound: u64,
    observed_overlap: u64,
    density: String,
}

fn verify(file: &MatrixFile) -> Result<VerifyReport> {
    let m = &file.matrix;
    let density = analysis::density(m);
    if density != file.meta.density {
        return Err(Error::Verification(format!(
            "declared density {} but payload has {density}",
            file.meta.density
        )));
    }
    let observed = if m.cols() < 2 {
        0
    } else {
        analysis::max_overlap(m)?
    };
    if observed > file.meta.overlap_bound {
        return Err(Error::Verification(format!(
            "observed overlap {observed} exceeds declared bound {}",
            file.meta.overlap_bound
        )));
    }
    if let AnyMatrix::Hadamard(h) = m {
        let limit = h.r_prime() as u64;
        let spawn = h.spawn();
        for parent in 0..h.parent_count() {
            for i in parent * spawn..(parent + 1) * spawn {
                for j in i + 1..(parent + 1) * spawn {
                    if h.inner(i, j).unsigned_abs() > limit {
                        return Err(Error::Verification(format!(
                            "columns {} and {} from one parent have inner product above r' = {limit}",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(VerifyReport {
        ok: true,
        declared_bound: file.meta.overlap_bound,
        observed_overlap: observed,
        density: density.to_string(),
    })
}

/// Runs one parsed command, writing human-facing output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Devore { p, r, out: path } => {
            let m = devore_matrix(DevoreParams::new(p, r)?)?;
            let params = Params {
                p: Some(p),
                r: Some(r),
                ..Params::default()
            };
            let file = MatrixFile::new(
                AnyMatrix::Binary(m),
                Construction::Devore,
                params,
                vec![],
                vec![],
            );
            write_file(&file, &path, out)
        }
        Command::Compose { a, b, k, out: path } => {
            let fa = MatrixFile::read(&a)?;
            let fb = MatrixFile::read(&b)?;
            let (ma, mb) = (require_binary(&fa, &a)?, require_binary(&fb, &b)?);
            let params = ComposeParams::new(k);
            let m = compose(&ma, &mb, params)?;
            let warnings = compose_warnings(&ma, params);
            let file = MatrixFile::new(
                AnyMatrix::Binary(m),
                Construction::Compose,
                Params {
                    k: Some(k),
                    ..Params::default()
                },
                vec![fa.provenance(), fb.provenance()],
                warnings,
            );
            write_file(&file, &path, out)
        }
        Command::Ternary {
            input,
            mode,
            rprime,
            out: path,
        } => {
            let src = MatrixFile::read(&input)?;
            let m = require_binary(&src, &input)?;
            let r = m.overlap_bound();
            let (matrix, kind, params) = match mode {
                TernaryMode::Signflip => (
                    AnyMatrix::Ternary(sign_flip(&m)),
                    Construction::Signflip,
                    Params {
                        r: Some(r),
                        ..Params::default()
                    },
                ),
                TernaryMode::Hadamard => {
                    let rp =
                        rprime.ok_or_else(|| Error::param("hadamard mode requires --rprime"))?;
                    (
                        AnyMatrix::Hadamard(hadamard_expand(&m, rp as usize)?),
                        Construction::Hadamard,
                        Params {
                            r: Some(r),
                            r_prime: Some(rp),
                            ..Params::default()
                        },
                    )
                }
            };
            let file = MatrixFile::new(matrix, kind, params, vec![src.provenance()], vec![]);
            write_file(&file, &path, out)
        }
        Command::Plan {
            rows,
            r,
            execute,
            out: path,
            json,
        } => {
            let plan = plan_row_size_with_degree(rows, r)?;
            if json {
                print_json(&plan, out)?;
            } else {
                writeln!(out, "{plan}")?;
            }
            if execute {
                let path = path.ok_or_else(|| Error::param("--execute requires --out"))?;
                let m = execute_plan(&plan)?;
                let params = Params {
                    r: Some(r),
                    k: Some(plan.k),
                    m: Some(rows),
                    ..Params::default()
                };
                let file = MatrixFile::new(
                    AnyMatrix::Binary(m),
                    Construction::Plan,
                    params,
                    vec![],
                    vec![],
                );
                write_file(&file, &path, out)?;
            }
            Ok(())
        }
        Command::Analyze { input, force } => {
            let file = MatrixFile::read(&input)?;
            check_ceiling(&file.matrix, force)?;
            print_json(&analysis::analyze(&file.matrix)?, out)
        }
        Command::Omp {
            input,
            sparsity,
            trials,
            seed,
            tol,
            force,
        } => {
            let file = MatrixFile::read(&input)?;
            check_ceiling(&file.matrix, force)?;
            let stats = analysis::omp_monte_carlo(&file.matrix, sparsity, trials, seed, tol)?;
            #[derive(Serialize)]
            struct OmpReport {
                sparsity: usize,
                seed: u64,
                #[serde(flatten)]
                stats: analysis::RecoveryStats,
                success_rate: f64,
            }
            let success_rate = stats.success_rate();
            print_json(
                &OmpReport {
                    sparsity,
                    seed,
                    stats,
                    success_rate,
                },
                out,
            )
        }
        Command::Verify { input, force } => {
            let file = MatrixFile::read(&input)?;
            check_ceiling(&file.matrix, force)?;
            print_json(&verify(&file)?, out)
        }
    }
}
