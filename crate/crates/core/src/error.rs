use std::path::PathBuf;

use thiserror::Error;

/// Structural problems in a score: bad pitches, unbalanced or nested
/// repeats, dangling navigation markers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct ValidationError {
    /// JSON path or boundary description of the offending item.
    pub field: String,
    pub message: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn at_boundary(position: usize, message: impl Into<String>) -> Self {
        Self::new(format!("markers@{position}"), message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MidiError {
    #[error("malformed MIDI at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("unsupported MIDI format {0} (only formats 0 and 1 are read)")]
    UnsupportedFormat(u16),
}

impl MidiError {
    pub(crate) fn at(offset: usize, message: impl Into<String>) -> Self {
        MidiError::Malformed {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid score: {0}")]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Midi(#[from] MidiError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
