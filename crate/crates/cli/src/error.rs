use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Core(airy_gibbs::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<airy_gibbs::Error> for CliError {
    fn from(e: airy_gibbs::Error) -> Self {
        use airy_gibbs::Error as E;
        match e {
            E::InvalidArgument(m) => CliError::Usage(m),
            E::Infeasible(m) => CliError::Infeasible(m),
            t @ E::ResampleTimeout { .. } => CliError::Infeasible(t.to_string()),
            other => CliError::Core(other),
        }
    }
}
