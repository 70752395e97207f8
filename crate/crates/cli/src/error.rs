use std::fmt;

use kaleido_core::Error;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PARSE: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;
pub const EXIT_DIVERGED: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new(EXIT_USAGE, message)
    }

    pub fn verify(message: impl Into<String>) -> Self {
        CliError::new(EXIT_VERIFY, message)
    }

    /// Wraps a core error caused by flag values rather than input files.
    pub fn bad_params(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Diverged { .. } => e.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Diverged { .. } => EXIT_DIVERGED,
            _ => EXIT_OTHER,
        };
        CliError::new(code, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
