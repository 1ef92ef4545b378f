use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series that does not converge for the requested parameter.
    #[error("divergent series: {0}")]
    Divergence(String),

    /// An adaptive routine exhausted its budget before meeting its tolerance.
    #[error("accuracy target not met: {context} (best estimate {best:.17e}, error estimate {abs_err:.3e})")]
    Accuracy {
        context: String,
        best: f64,
        abs_err: f64,
    },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Stable machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Divergence(_) => "divergence",
            Error::Accuracy { .. } => "accuracy",
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
