use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cell E = {energy} eV, w = {frequency} rad/fs: {source}")]
    Cell {
        energy: f64,
        frequency: f64,
        #[source]
        source: tunnelnoise_core::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] tunnelnoise_core::Error),
    #[error("unknown observable `{0}` (expected S or I2)")]
    UnknownObservable(String),
    #[error("malformed records file: {0}")]
    Records(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl AppError {
    /// Process exit status: 2 for bad input, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::UnknownObservable(_) | Self::Records(_) => 2,
            Self::Cell { .. } | Self::Numerical(_) => 3,
            Self::Io(_) | Self::Csv(_) => 1,
        }
    }
}
