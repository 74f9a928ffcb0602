use thiserror::Error;

/// Errors surfaced by the broker library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown policy `{given}` (valid: {valid})")]
    UnknownPolicy { given: String, valid: String },

    #[error("unknown preset `{given}` (valid: {valid})")]
    UnknownPreset { given: String, valid: String },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("training phase incomplete: arm {tenant} has never been pulled")]
    UntrainedArm { tenant: usize },

    #[error("lock-up carry-over exceeds capacity: {locked} > {capacity}")]
    LockedOverBudget { locked: u32, capacity: u32 },

    #[error("policy broke a round constraint: {0}")]
    PolicyContract(String),

    #[error("numerical integration failed: residual estimate {residual:e} above tolerance {tolerance:e}")]
    Integration { residual: f64, tolerance: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
