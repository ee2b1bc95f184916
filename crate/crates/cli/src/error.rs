use thiserror::Error;

/// Failures surfaced by the command line driver.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] powpart_core::Error),

    #[error("cli-harness: invalid input: {0}")]
    Usage(String),

    #[error("cli-harness: config: {0}")]
    Config(String),

    #[error("cli-harness: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cli-harness: self-test suite '{0}' had failures")]
    SelfTest(String),
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    /// Process exit status: 2 invalid input, 3 convergence, 4 precision
    /// ambiguity, 5 resource guard, 1 self-test failure.
    pub fn exit_code(&self) -> i32 {
        use powpart_core::Error as E;
        match self {
            HarnessError::Core(e) => match e {
                E::InvalidInput { .. } | E::Domain { .. } | E::Range { .. } | E::OrderOutOfRange { .. } => 2,
                E::Convergence { .. } | E::Bracket { .. } => 3,
                E::PrecisionAmbiguous { .. } => 4,
                E::Guard { .. } | E::Truncation { .. } => 5,
            },
            HarnessError::Usage(_) | HarnessError::Config(_) | HarnessError::Io { .. } => 2,
            HarnessError::SelfTest(_) => 1,
        }
    }
}

pub(crate) fn io_error(path: &std::path::Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}
