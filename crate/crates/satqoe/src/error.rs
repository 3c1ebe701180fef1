use std::path::{Path, PathBuf};

use serde::Serialize;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] satqoe_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("pcap: {message} at byte offset {offset}")]
    Pcap { offset: u64, message: String },

    #[error("pcap truncated at byte offset {offset} after {complete_records} complete records")]
    PcapTruncated { offset: u64, complete_records: usize },

    /// Malformed text input; the message names the row.
    #[error("{0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error("missing {}: run `satqoe {producer}` first", path.display())]
    MissingArtifact { path: PathBuf, producer: &'static str },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn parse(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        Error::Parse { path: path.as_ref().to_path_buf(), message: message.into() }
    }

    /// Attach a file path to format errors.
    pub fn at(self, path: impl AsRef<Path>) -> Self {
        match self {
            Error::Format(message) => Error::parse(path, message),
            other => other,
        }
    }

    /// Short stable name for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(_) => "core",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Pcap { .. } | Error::PcapTruncated { .. } => "pcap",
            Error::Format(_) => "parse",
            Error::Config(_) => "config",
            Error::MissingArtifact { .. } => "missing_artifact",
            Error::Usage(_) => "usage",
        }
    }

    /// Machine-readable summary printed on failure.
    pub fn summary(&self) -> ErrorSummary {
        let path = match self {
            Error::Io { path, .. } | Error::Parse { path, .. } | Error::MissingArtifact { path, .. } => {
                Some(path.display().to_string())
            }
            _ => None,
        };
        let producer = match self {
            Error::MissingArtifact { producer, .. } => Some(*producer),
            _ => None,
        };
        ErrorSummary { status: "error", kind: self.kind(), message: self.to_string(), path, producer }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorSummary {
    pub status: &'static str,
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub producer: Option<&'static str>,
}
