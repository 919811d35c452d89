use thiserror::Error;

/// Errors raised by model construction, simulation and reduction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    Dimension {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("algebraic solve did not converge after {iterations} iterations (residual {residual:e})")]
    AlgebraicNonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value in `{variable}` at t = {time} s")]
    NonFinite { variable: String, time: f64 },

    #[error("index {index} out of range for {what} of size {len}")]
    IndexOutOfRange {
        what: String,
        index: usize,
        len: usize,
    },

    #[error("secondary algebraic variables are not supported (non-primary algebraic variables {0:?} feed retained equations)")]
    SecondaryAlgebraic(Vec<usize>),

    #[error("singular {what} (condition ratio {ratio:e})")]
    Singular { what: String, ratio: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("missing input channel `{0}`")]
    MissingChannel(String),

    #[error("unknown input channel `{0}`")]
    UnknownChannel(String),

    #[error("empty {0}")]
    Empty(String),

    #[error("campaign point {index} failed: {source}")]
    Campaign {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("at t = {time} s: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(what: impl Into<String>, expected: usize, actual: usize) -> Self {
        Error::Dimension {
            what: what.into(),
            expected,
            actual,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::InvalidModel(_) => "invalid_model",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::AlgebraicNonConvergence { .. } => "algebraic_non_convergence",
            Error::NonFinite { .. } => "non_finite",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::SecondaryAlgebraic(_) => "secondary_algebraic",
            Error::Singular { .. } => "singular",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::MissingChannel(_) => "missing_channel",
            Error::UnknownChannel(_) => "unknown_channel",
            Error::Empty(_) => "empty",
            Error::Campaign { .. } => "campaign",
            Error::AtTime { source, .. } => source.kind(),
            Error::Serde(_) => "serde",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
        }
    }
}
