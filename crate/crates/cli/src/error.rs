use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical guard: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn from_core_in(section: &str, e: relecho::Error) -> Self {
        if e.is_numerical_guard() {
            CliError::Numerical(format!("[{section}] {e}"))
        } else {
            CliError::Validation(format!("[{section}] {e}"))
        }
    }
}

impl From<relecho::Error> for CliError {
    fn from(e: relecho::Error) -> Self {
        if e.is_numerical_guard() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
