use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, HoiError>;

#[derive(Debug, thiserror::Error)]
pub enum HoiError {
    #[error(transparent)]
    Core(#[from] hoinet_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(String),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {attempts} replicate attempts failed; last error: {last}")]
    ReplicatesExhausted { attempts: usize, failed: usize, last: hoinet_core::Error },
}

impl HoiError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// 1 for numerical failures, 2 for usage and input errors.
    pub fn exit_code(&self) -> i32 {
        use hoinet_core::Error as E;
        match self {
            Self::Core(E::InvalidInput(_) | E::DimensionMismatch(_) | E::ZeroVariance { .. }) => 2,
            Self::Core(_) | Self::ReplicatesExhausted { .. } => 1,
            Self::Io { .. } | Self::Json(_) | Self::Csv(_) | Self::Usage(_) => 2,
        }
    }
}

impl From<csv::Error> for HoiError {
    fn from(e: csv::Error) -> Self {
        Self::Csv(e.to_string())
    }
}
