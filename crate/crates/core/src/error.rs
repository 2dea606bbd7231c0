use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("alpha = {0} is not supported by this operation")]
    UnsupportedAlpha(f64),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("only {usable} usable regression points, need at least 2")]
    InsufficientPoints { usable: usize },

    #[error("degenerate weights in location estimator (denominator {0:e})")]
    DegenerateWeights(f64),

    #[error("empirical characteristic function vanishes at frequency {index}")]
    EcfVanishes { index: usize },

    #[error("singular system (condition number {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("collinear regressors")]
    CollinearInput,

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("quadrature accuracy not met: achieved {achieved:e}, target {target:e}")]
    AccuracyNotMet { achieved: f64, target: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input")]
    EmptyInput,

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("cannot parse {value:?} at row {row}, column {column}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable category, used as the CLI error prefix.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid-params",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::UnsupportedAlpha(_) => "unsupported-alpha",
            Error::DegenerateSample(_) => "degenerate-sample",
            Error::InsufficientPoints { .. } => "insufficient-points",
            Error::DegenerateWeights(_) => "degenerate-weights",
            Error::EcfVanishes { .. } => "ecf-vanishes",
            Error::SingularSystem { .. } => "singular-system",
            Error::CollinearInput => "collinear-input",
            Error::NonConvergence { .. } => "non-convergence",
            Error::AccuracyNotMet { .. } => "accuracy-not-met",
            Error::InvalidConfig(_) => "invalid-config",
            Error::EmptyInput => "empty-input",
            Error::MissingColumn(_) => "missing-column",
            Error::Parse { .. } => "parse-error",
            Error::NonPositivePrice { .. } => "non-positive-price",
            Error::Io(_) => "io-error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
