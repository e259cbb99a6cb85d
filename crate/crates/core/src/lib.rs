//! Deterministic sparse binary and ternary compressed-sensing matrices.
//!
//! Base matrices come from polynomial graphs over Z_p ([`devore`]). Two
//! block binary matrices compose into one with block size `n n'`, `k`
//! blocks and `M M'` columns ([`compose`]); iterated composition reaches any
//! row count with at least three prime factors ([`planner`]). Ternary
//! variants come from sign flips or Hadamard rows ([`ternary`]), and
//! [`analysis`] checks overlap, coherence, density and RIP bounds exactly.
//!
//! ```
//! use blockcs::{compose, devore_matrix, ComposeParams, DevoreParams};
//! use blockcs::analysis::coherence;
//! use num_rational::Ratio;
//!
//! let psi = devore_matrix(DevoreParams::new(2, 1)?)?;
//! let psi2 = devore_matrix(DevoreParams::new(3, 1)?)?;
//! let phi = compose(&psi, &psi2, ComposeParams::new(2))?;
//! assert_eq!(phi.tuple(1), &[4, 4]);
//! assert_eq!(coherence(&phi)?, Ratio::new(1, 2));
//! # Ok::<(), blockcs::Error>(())
//! ```

pub mod analysis;
pub mod block;
pub mod cli;
pub mod compose;
pub mod devore;
pub mod error;
pub mod io;
pub mod planner;
pub mod sparse;
pub mod ternary;

pub use block::{
    matrix_to_tuples, truncate_blocks, tuple_from_support, tuples_to_matrix, BlockBinaryMatrix,
    SupportTupleSet, TernaryBlockMatrix,
};
pub use compose::{compose, compose_chain, ComposeParams};
pub use devore::{devore_matrix, eval_poly, DevoreParams};
pub use error::{Error, Result};
pub use io::{AnyMatrix, MatrixFile};
pub use planner::{execute_plan, factorize, plan_row_size, CompositionPlan};
pub use sparse::{SensingMatrix, SparseColumns};
pub use ternary::{
    hadamard_expand, hadamard_sylvester, sign_flip, HadamardMatrix, HadamardTernaryMatrix,
};
