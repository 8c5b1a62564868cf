use serde_json::json;
use thiserror::Error;

use sheath_core::SheathError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] SheathError),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    /// A report was produced but its verdict is "no solution".
    #[error("no solution: {0}")]
    NoSolution(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Core(SheathError::InvalidInput(msg.into()))
    }

    pub fn code(&self) -> &str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Parse(_) => "INVALID_INPUT",
            CliError::Io(_) => "IO_ERROR",
            CliError::Json(_) => "IO_ERROR",
            CliError::NoSolution(code) => code,
        }
    }

    /// 2 for "no solution" verdicts, 3 for bad input, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_no_solution() => 2,
            CliError::NoSolution(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
            _ => 3,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.code(), "message": self.to_string() }).to_string()
    }
}
