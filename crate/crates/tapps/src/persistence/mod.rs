//! File IO: CSV ingestion/export and whole-session save/load.

pub mod csv;
pub mod session;

use std::path::PathBuf;

use thiserror::Error;

use crate::dataframe::DataError;

#[derive(Debug, Error, PartialEq)]
pub enum PersistError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("could not read {}: {reason}", path.display())]
    ReadFailure { path: PathBuf, reason: String },
    #[error("could not write {}: {reason}", path.display())]
    WriteFailure { path: PathBuf, reason: String },
    #[error("record starting on line {0} has the wrong number of fields")]
    RaggedRow(usize),
    #[error("no records in {}", .0.display())]
    EmptyFile(PathBuf),
    #[error("line {line}: {reason}")]
    FormatError { line: usize, reason: String },
    #[error("unsupported session file version {0:?}")]
    VersionMismatch(String),
    #[error(transparent)]
    Data(#[from] DataError),
}
