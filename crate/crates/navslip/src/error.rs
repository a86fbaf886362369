use std::path::PathBuf;

use navslip_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("check failed: {0}")]
    Numerical(String),
    #[error("acceptance threshold violated: {0}")]
    Threshold(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 config/validation, 2 numerical failure, 3 threshold.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::Format(_) => 1,
            Self::Core(e) => match e {
                CoreError::Config(_) | CoreError::Domain(_) | CoreError::Range(_) | CoreError::Contract(_) => 1,
                CoreError::GridTooCoarse { .. }
                | CoreError::Tangency { .. }
                | CoreError::BlowUp { .. }
                | CoreError::StudyBlowUp { .. } => 2,
            },
            Self::Numerical(_) => 2,
            Self::Threshold(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
