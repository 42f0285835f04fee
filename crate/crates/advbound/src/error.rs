//! Crate-wide error type and exit-code mapping for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A CSV row that could not be parsed at all.
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    /// A point whose coordinate count disagrees with the first row.
    #[error("row {row}: expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    /// A negative sample weight (zero weights are dropped, not rejected).
    #[error("row {row}: weight {weight} is negative")]
    NegativeWeight { row: usize, weight: f64 },

    /// A class whose atoms all vanished (e.g. every row had zero weight).
    #[error("class with label {label} has no atoms with positive weight")]
    EmptyClass { label: u64 },

    #[error("dataset contains no points")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Constraint enumeration hit the configured edge budget.
    #[error("constraint edge count exceeded the limit of {limit}")]
    EdgeLimit { limit: usize },

    /// The barrier loop ran out of centering rounds without certifying.
    #[error("solver failed to converge: {0}")]
    NonConvergence(String),

    /// A Newton step could not be completed (factorization or line search).
    #[error("Newton step failed: {0}")]
    NumericalFailure(String),

    #[error("reference oracle only handles up to {max} variables, got {got}")]
    OracleTooLarge { got: usize, max: usize },

    #[error("generalized logarithm is undefined for negative argument {0}")]
    NegativeLogArgument(f64),

    #[error(
        "argument {arg} is outside the domain of the generalized exponential at alpha = {alpha}"
    )]
    ExpDomain { alpha: f64, arg: f64 },

    /// No finite entry to normalize against.
    #[error("every entry is infinite; no normalizer exists")]
    AllInfinite,

    /// A query point that no class can reach under the 0/infinity cost.
    #[error("query {query} is unreachable: every class transform is infinite")]
    UnreachableQuery { query: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("solution file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 for validation problems,
    /// 3 for solver non-convergence, 4 for resource limits, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::NumericalFailure(_) => 3,
            Error::EdgeLimit { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
