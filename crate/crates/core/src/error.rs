use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("sample entropy undefined: {length_m} matches at length m, {length_m1} at length m+1")]
    UndefinedEntropy { length_m: u64, length_m1: u64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("subject {subject}, channel {channel}: {source}")]
    Feature {
        subject: String,
        channel: String,
        #[source]
        source: Box<Error>,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 2 config, 3 data/format,
    /// 4 numerical/training.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param(_) | Error::Config(_) => 2,
            Error::Format(_) | Error::Io { .. } | Error::Contract(_) => 3,
            Error::Degenerate(_)
            | Error::UndefinedEntropy { .. }
            | Error::Fit(_)
            | Error::Training(_) => 4,
            Error::Feature { source, .. } | Error::Fold { source, .. } => source.exit_code(),
        }
    }
}
