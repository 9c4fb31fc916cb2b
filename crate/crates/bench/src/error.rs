use std::io;
use std::path::PathBuf;

use crate::ingest::IngestError;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Core(#[from] frechet_sdr::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("bootstrap needs at least 2 resamples, got {0}")]
    InvalidResampleCount(usize),
    #[error("{0}")]
    Execution(String),
}

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        BenchError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for problems with the configuration or the input files, 2 for
    /// failures while running.
    pub fn exit_code(&self) -> i32 {
        use frechet_sdr::Error as E;
        match self {
            BenchError::Config(_) | BenchError::Ingest(_) | BenchError::InvalidResampleCount(_) => 1,
            BenchError::Core(
                E::InvalidConfig(_) | E::UnknownModel(_) | E::UnknownMetric(_) | E::InvalidBins(_),
            ) => 1,
            _ => 2,
        }
    }
}
