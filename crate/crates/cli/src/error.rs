use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tdhf_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the input, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use tdhf_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core(E::InvalidParameter { .. } | E::CapExceeded { .. } | E::GridMismatch) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
