use thiserror::Error;

/// Errors raised by the estimators, the fitters and the dataset/report I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("all weights are zero")]
    ZeroWeights,

    #[error("negative weight {0}")]
    NegativeWeight(f64),

    #[error("probability {0} outside the admissible range {1}")]
    Probability(f64, &'static str),

    #[error("covariate dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("covariate column {column} out of range for dimension {dim}")]
    Column { column: usize, dim: usize },

    #[error("no observed biomarker values in population")]
    NoObserved,

    #[error("missingness indicator is constant (all {0}); propensity model is not identifiable")]
    ConstantIndicator(u8),

    #[error("too few cases: need at least {needed}, have {have}")]
    TooFewCases { needed: usize, have: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("logistic fit diverged (|theta| = {norm:.3e}): data are separated and the MLE does not exist")]
    Separation { norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("replication {index}: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical fitters (separation, rank
    /// deficiency), as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::RankDeficient | Error::Separation { .. } => true,
            Error::Replication { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
