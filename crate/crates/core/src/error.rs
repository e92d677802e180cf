use thiserror::Error;

/// Errors raised by the arithmetic, pipeline and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or mismatched arguments (lengths, moduli, indices).
    #[error("argument error: {0}")]
    Argument(String),

    /// Parameters that cannot be realized, e.g. no prime of the requested size.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input does not fit in the available slots or coefficient budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Operation applied to a value in the wrong representation or stage.
    #[error("state error: {0}")]
    State(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A single fault trial failed; the run is aborted.
    #[error("trial {spec} failed: {reason}")]
    Trial { spec: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
