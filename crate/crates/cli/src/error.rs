use std::path::PathBuf;

use bea_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 usage, 3 config, 4 numerical, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidLambda(_) | Error::InvalidRho(_) | Error::TooFewNodes(_) => 2,
                Error::Config(_) | Error::SweepValue { .. } | Error::InvalidGeometry(_) => 3,
                Error::Singular { .. } | Error::RecursionDepth(_) => 4,
                _ => 1,
            },
            CliError::Manifest(_) => 3,
            CliError::Io { .. } | CliError::Mismatch(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
