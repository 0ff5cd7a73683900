use thiserror::Error;

/// Errors produced by ingestion, estimation and aggregation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input rejected outright (non-positive price, duplicate date, non-finite value).
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("insufficient data for {what}: need at least {needed}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// Zero-variance or otherwise structureless input.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A log-log fit met a zero fluctuation, so the scaling exponent is undefined.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient points for a power-law fit: need at least 3, got {0}")]
    InsufficientPoints(usize),

    #[error("regression undefined: {0}")]
    RegressionUndefined(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("synthetic generation failed: {0}")]
    Generation(String),

    /// Wraps an estimator failure with the name of the failing measure.
    #[error("{method}: {source}")]
    Estimator {
        method: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed CSV at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn in_method(self, method: &'static str) -> Error {
        Error::Estimator {
            method,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping `Estimator` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Estimator { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
