use std::io;
use std::path::{Path, PathBuf};

use normprobe_core::dataset_ops::DatasetError;
use normprobe_core::metrics::MetricsError;
use normprobe_core::probe::ProbeError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const USAGE_OR_IO: i32 = 1;
    pub const FORMAT: i32 = 2;
    pub const ALIGNMENT: i32 = 3;
    pub const NUMERIC: i32 = 4;
    pub const CONSTRAINT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Format {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("results files do not share an attribute axis: {0}")]
    MismatchedAttributeAxes(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn format(path: &Path, line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::USAGE_OR_IO,
            CliError::Format { .. } => exit::FORMAT,
            CliError::Probe(ProbeError::Alignment { .. }) => exit::ALIGNMENT,
            CliError::Probe(ProbeError::Numeric { .. }) => exit::NUMERIC,
            CliError::Probe(ProbeError::Split(_)) => exit::USAGE_OR_IO,
            CliError::Probe(_) => exit::CONSTRAINT,
            CliError::Dataset(_) | CliError::Metrics(_) | CliError::MismatchedAttributeAxes(_) => {
                exit::CONSTRAINT
            }
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
