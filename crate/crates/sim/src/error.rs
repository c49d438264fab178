use std::path::PathBuf;

/// Everything the simulator can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] seqdec_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SimError {
    /// 2 invalid config, 3 infeasible system, 4 numerical failure, 1 I/O.
    pub fn exit_code(&self) -> u8 {
        use seqdec_core::Error as E;
        match self {
            Self::Config(_) => 2,
            Self::Core(E::InvalidInput(_)) => 2,
            Self::Core(E::Infeasible { .. }) => 3,
            Self::Core(E::Singular(_) | E::Shape(_)) => 4,
            Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
