use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{0} simulation run(s) hit the step limit without absorbing")]
    NotAbsorbed(u64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 2 config, 3 numeric/integration, 4 non-absorbed. I/O is 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::NotAbsorbed(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn config(msg: impl std::fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }
}

/// Errors from the library describe bad input unless the dynamics themselves failed.
impl From<evoswitch::Error> for CliError {
    fn from(e: evoswitch::Error) -> Self {
        match e {
            evoswitch::Error::BoundaryState => CliError::Numeric(e.to_string()),
            evoswitch::Error::NotAbsorbed { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
