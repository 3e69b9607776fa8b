use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Module(#[from] loyd_core::Error),
    /// A check ran to completion and failed.
    #[error("{0}")]
    Failed(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Schema(_) => "schema",
            CliError::Usage(_) => "usage",
            CliError::Module(e) => e.kind(),
            CliError::Failed(_) => "verification",
        }
    }

    /// 0 ok, 1 io, 2 schema or usage, 3 module error, 4 verification
    /// failure, 5 capacity.
    pub fn exit_code(&self) -> i32 {
        use loyd_core::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Schema(_) | CliError::Usage(_) => 2,
            CliError::Module(E::Verification(_)) | CliError::Failed(_) => 4,
            CliError::Module(E::Capacity(_) | E::CappedSample { .. }) => 5,
            CliError::Module(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

pub fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
