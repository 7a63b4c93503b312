//! File formats, experiment drivers and self-checks around [`gwishart_core`].
//!
//! The binary in this crate exposes the same functionality on the command line.

pub mod experiments;
pub mod formats;
pub mod selfcheck;

use gwishart_core::SymmetricMatrix;

pub use gwishart_core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] gwishart_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("reference table not reproduced under either scatter convention")]
    TableMismatch { centered: SymmetricMatrix, uncentered: SymmetricMatrix },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}
