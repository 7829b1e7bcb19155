use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("check failed: {0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(nsrg_core::Error),
}

impl From<nsrg_core::Error> for CliError {
    fn from(e: nsrg_core::Error) -> Self {
        use nsrg_core::Error as E;
        match e {
            E::BlowUp { .. } | E::PicardDivergence { .. } => CliError::BlowUp(e.to_string()),
            E::SweepRun { ref source, .. }
                if matches!(**source, E::BlowUp { .. } | E::PicardDivergence { .. }) =>
            {
                CliError::BlowUp(e.to_string())
            }
            E::InvalidConfig(_) | E::InvalidParams(_) | E::BasisTooLarge { .. } | E::SweepRun { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 1 failed check or internal error, 2 configuration, 3 blow-up.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::BlowUp(_) => 3,
            _ => 1,
        })
    }
}
