//! Batch front-end for ringlab: TOML-configured experiments that write CSV,
//! SVG and a pass/fail comparison report.

pub mod config;
pub mod experiments;
pub mod plot;
pub mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        #[source]
        source: ringlab::Error,
    },

    #[error("cannot plot: {0}")]
    Plot(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn numerical(context: &'static str, source: ringlab::Error) -> Self {
        match source {
            ringlab::Error::Argument(msg) => Self::Config(format!("{context}: {msg}")),
            source => Self::Numerical { context, source },
        }
    }

    /// 2 for usage, configuration and I/O problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Numerical { .. } | Self::Plot(_) => 3,
        }
    }
}
