use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by constructions, analyses and file I/O.
///
/// The variants group into the exit-code classes used by the CLI, see
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    /// A construction parameter is outside its admissible domain.
    #[error("{0}")]
    Parameter(String),

    /// A tuple entry fell outside `1..=n` or a block index outside `1..=k`.
    #[error("value {value} out of range {min}..={max} ({what})")]
    Range {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    /// Two columns carry the same support tuple.
    #[error("duplicate column: columns {first} and {second} have identical support")]
    DuplicateColumn { first: usize, second: usize },

    /// A dense or sparse matrix does not have the block structure claimed for it.
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    /// The row size lies outside the composition theorem's domain.
    #[error("{0}")]
    NotCovered(String),

    /// A metric needs at least two columns.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Coherence of a matrix with non-uniform column weights is not rational.
    #[error("coherence is irrational; its square is {squared}")]
    IrrationalCoherence { squared: num_rational::Ratio<u64> },

    /// Least squares on the OMP active set has no unique solution.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// A re-verification disagreed with declared metadata.
    #[error("verification failed: {0}")]
    Verification(String),

    /// A matrix file or its sidecar could not be parsed.
    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedMatrix(msg.into())
    }

    /// Process exit code: 2 parameter/domain error, 3 malformed input, 4
    /// verification failure, 1 anything else (I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Range { .. }
            | Error::DuplicateColumn { .. }
            | Error::NotCovered(_)
            | Error::UndefinedMetric(_)
            | Error::IrrationalCoherence { .. }
            | Error::Degenerate(_) => 2,
            Error::MalformedMatrix(_) | Error::MalformedFile { .. } | Error::Json(_) => 3,
            Error::Verification(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
