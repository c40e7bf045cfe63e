use thiserror::Error;
use vortex_sheet::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("computation failed: {0}")]
    Computation(#[source] CoreError),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialisation failed: {0}")]
    Serialize(String),

    #[error("{failed} of {total} invariant checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Computation(_) | Self::Io { .. } | Self::Serialize(_) => 2,
            Self::VerifyFailed { .. } => 3,
        }
    }
}

impl From<CoreError> for CliError {
    /// Parameter-level rejections count as validation, everything else as computation.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::MachOutOfRange { .. }
            | CoreError::NoGrowingRoot { .. }
            | CoreError::FrontOutOfRange { .. }
            | CoreError::DegenerateMode
            | CoreError::StepTooLarge { .. }
            | CoreError::UnderResolved { .. } => Self::Validation(e.to_string()),
            other => Self::Computation(other),
        }
    }
}
