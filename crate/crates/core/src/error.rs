use thiserror::Error;

/// Errors raised by the library. The variants map onto the CLI exit codes
/// (see [`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("index {index} out of range for schedule of length {len}")]
    Range { index: usize, len: usize },
    #[error("problem too large: {size} exceeds cap {cap}")]
    Size { size: usize, cap: usize },
    #[error("integration left the finite range at t = {t}")]
    Integration { t: f64, last_state: Vec<f64> },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Stable process exit code: 1 config/parameter, 3 I/O.
    /// Divergence (exit code 2) is a run outcome, not an error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
