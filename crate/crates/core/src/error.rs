use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input could not be parsed. `line` is 1-based when known.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    /// Evaluation requested at or beyond the critical time.
    #[error("t = {t} is at/after singularity t_c = {tc}")]
    AtSingularity { t: f64, tc: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
