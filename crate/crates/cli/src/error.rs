use std::path::PathBuf;

use serde_json::json;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] resonance_core::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(resonance_core::Error::Io { .. }) => EXIT_IO,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Verification { .. } => EXIT_VERIFY,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_IO => "io",
            EXIT_VERIFY => "verification",
            _ => "config",
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn to_json_line(&self) -> String {
        json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

pub type CliResult<T> = Result<T, CliError>;
