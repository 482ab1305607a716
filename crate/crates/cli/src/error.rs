use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config file not found: {}", .0.display())]
    ConfigNotFound(PathBuf),
    #[error("config error: {0}")]
    Config(String),
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error("truncation budget exceeded: {0}")]
    Truncation(String),
    #[error("non-finite value in column `{column}` of row {row}")]
    NonFinite { column: String, row: usize },
    #[error(transparent)]
    Core(#[from] nbesov::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 2 config, 3 fixture/tag, 4 truncation budget, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use nbesov::Error as E;
        match self {
            CliError::ConfigNotFound(_) | CliError::Config(_) => 2,
            CliError::Fixture(_) => 3,
            CliError::Truncation(_) => 4,
            CliError::Core(e) => match e {
                E::ConstraintViolation(_) | E::Domain(_) | E::Alias { .. } | E::Precondition(_) => 2,
                E::Tag { .. } => 3,
                E::Divergent(_) => 4,
                E::DivideByZero(_) => 1,
            },
            CliError::NonFinite { .. } | CliError::Io(_) => 1,
        }
    }
}

/// Reinterpret constraint failures raised while building a fixture.
pub(crate) fn fixture(e: nbesov::Error) -> CliError {
    match e {
        nbesov::Error::ConstraintViolation(msg) => CliError::Fixture(msg),
        other => CliError::Core(other),
    }
}
