use std::fmt;

/// Exit status for a configuration or usage error.
pub const EXIT_CONFIG: u8 = 2;
/// Exit status for a failed simulation or an unwritable output.
pub const EXIT_RUN: u8 = 3;
/// Exit status when a check ran but did not pass.
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Config { origin: String, message: String },
    Run(String),
    Acceptance(String),
}

impl CliError {
    pub fn config(origin: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            origin: origin.to_string(),
            message: message.into(),
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Run(_) => EXIT_RUN,
            CliError::Acceptance(_) => EXIT_ACCEPTANCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { origin, message } => write!(f, "config error in {origin}: {message}"),
            CliError::Run(m) => write!(f, "run failed: {m}"),
            CliError::Acceptance(m) => write!(f, "checks failed: {m}"),
        }
    }
}

impl From<kiu_core::Error> for CliError {
    fn from(e: kiu_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("output: {e}"))
    }
}
