use std::path::{Path, PathBuf};

/// Errors surfaced by the command line, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Data(String),
    #[error("{context}: {source}")]
    Core { context: String, source: thermokit_core::Error },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn core(context: impl Into<String>, source: thermokit_core::Error) -> Error {
        Error::Core { context: context.into(), source }
    }

    /// 1 usage/config, 2 data validation, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } => 1,
            Error::Data(_) => 2,
            Error::Core { source, .. } if source.is_numerical() => 3,
            Error::Core { .. } => 2,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(e.to_string())
    }
}
