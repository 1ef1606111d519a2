use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sm_tomo::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical or runtime failures.
    pub fn exit_code(&self) -> u8 {
        use sm_tomo::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParams(_) | E::UnsupportedRank(_) | E::UnknownFixture(_) | E::DegreeTooHigh { .. }) => 2,
            CliError::Core(_) | CliError::Io(_) | CliError::Json(_) => 3,
        }
    }
}
