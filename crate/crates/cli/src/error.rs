use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or unusable input files. Exit code 2.
    Config(String),
    /// Initial datum outside the convergence region under `--strict`. Exit code 3.
    Domain(String),
    /// Anything else. Exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Domain(_) => ExitCode::from(3),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Domain(m) => write!(f, "domain violation: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<burgers_koopman::Error> for CliError {
    fn from(e: burgers_koopman::Error) -> Self {
        use burgers_koopman::Error as E;
        match e {
            E::MeshTooSmall(_)
            | E::InvalidArgument(_)
            | E::InvalidIndex(_)
            | E::NegativeTime(_)
            | E::RankDeficient { .. } => CliError::Config(e.to_string()),
            E::RegionViolation { .. } => CliError::Domain(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
