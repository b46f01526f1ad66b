use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Exit 2 for usage/validation problems, 1 for runtime failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<expertnet::Error> for CliError {
    fn from(e: expertnet::Error) -> Self {
        match e {
            expertnet::Error::NoContacts(_) => CliError::Runtime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
