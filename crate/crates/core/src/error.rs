use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("date ordering violated: {0}")]
    Ordering(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no forwarding curve for tenor {0}")]
    MissingCurve(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("rate fixing at {fixing} has expired at time {t}")]
    Expired { t: f64, fixing: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("implied volatility inversion failed: {0}")]
    Inversion(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(row: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            row,
            message: msg.into(),
        }
    }
}
