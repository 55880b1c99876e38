use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Generator parameters outside the supported regime.
    #[error("parameter out of domain: {0}")]
    Parameter(String),

    /// A quantity is mathematically undefined for the given input
    /// (e.g. GC on a complete graph).
    #[error("{0}")]
    Domain(String),

    /// Shortest-path enumeration for one pair would exceed the path cap.
    #[error("path enumeration for pair ({source_node}, {target}) exceeds cap of {cap} paths ({count} found)")]
    CapExceeded {
        source_node: usize,
        target: usize,
        cap: usize,
        count: u128,
    },

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    /// Caller asked for something that does not exist (unknown label, empty group).
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error: 2 for usage and parameter errors,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parameter(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
