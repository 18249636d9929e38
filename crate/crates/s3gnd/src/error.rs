use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A record parsed but violates a model invariant.
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: s3gnd_core::Error,
    },

    #[error(transparent)]
    Core(#[from] s3gnd_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("index format version {found} is not supported (expected {expected})")]
    Version { expected: u32, found: u32 },

    #[error("corrupt index file: {0}")]
    Corrupt(String),

    #[error("oracle mismatch on {0}")]
    OracleMismatch(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn is_fingerprint_mismatch(&self) -> bool {
        matches!(self, Error::Core(s3gnd_core::Error::FingerprintMismatch(_)))
    }
}

/// Attach a line number to core validation errors.
pub(crate) trait AtLine<T> {
    fn at_line(self, line: usize) -> Result<T>;
}

impl<T> AtLine<T> for s3gnd_core::Result<T> {
    fn at_line(self, line: usize) -> Result<T> {
        self.map_err(|source| Error::Invalid { line, source })
    }
}
