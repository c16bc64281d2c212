use thiserror::Error;

/// Exit code for unreadable or malformed input.
pub const EXIT_INPUT: i32 = 2;
/// Exit code for fit and domain failures.
pub const EXIT_FIT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Fit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Fit(_) => EXIT_FIT,
        }
    }
}

impl From<fts_core::Error> for CliError {
    fn from(e: fts_core::Error) -> Self {
        use fts_core::Error as E;
        match e {
            E::Parse { .. } | E::InvalidSeries(_) | E::Io(_) => CliError::Input(e.to_string()),
            E::AtSingularity { .. } | E::Domain(_) | E::Fit(_) => CliError::Fit(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
