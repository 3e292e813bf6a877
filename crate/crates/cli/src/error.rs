use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Tolerance(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Tolerance(_) => EXIT_TOLERANCE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<satotate::Error> for CliError {
    fn from(e: satotate::Error) -> Self {
        use satotate::Error as E;
        match e {
            E::ToleranceNotMet { .. } | E::NonConvergence { .. } | E::CalibrationRequired(_) => {
                CliError::Tolerance(e.to_string())
            }
            E::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
