use thermohygro_core::ExperimentError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown config key: {0}")]
    UnknownKey(String),
    #[error("experiment failed: {0}")]
    Experiment(#[from] ExperimentError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::UnknownKey(_) => 3,
            Self::Experiment(_) => 4,
        }
    }
}
