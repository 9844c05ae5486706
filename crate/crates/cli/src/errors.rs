//! Command-line error classification and exit codes.

use std::fmt;

/// Errors surfaced by the command loop, classified for exit codes:
/// parse errors exit 1, domain errors 2, I/O errors 3.
#[derive(Debug)]
pub enum CliError {
    Parse { column: usize, message: String },
    Module(continuum::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 1,
            CliError::Module(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn parse(column: usize, message: impl Into<String>) -> CliError {
        CliError::Parse { column, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { column, message } => {
                write!(f, "parse error at column {column}: {message}")
            }
            CliError::Module(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<continuum::Error> for CliError {
    fn from(e: continuum::Error) -> Self {
        match e {
            continuum::Error::Parse { column, message } => CliError::Parse { column, message },
            other => CliError::Module(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
