use std::fmt;

use serde_json::json;

/// Failure classes, each with its own process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    NonConvergence,
    Unachievable,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::NonConvergence => 3,
            ErrorKind::Unachievable => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            ErrorKind::Config => "config",
            ErrorKind::NonConvergence => "non_convergence",
            ErrorKind::Unachievable => "unachievable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    /// The JSON line written to stderr.
    pub fn record(&self) -> String {
        json!({
            "error": {
                "kind": self.kind.label(),
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<molrss::Error> for CliError {
    fn from(err: molrss::Error) -> Self {
        let kind = match err {
            molrss::Error::Quadrature { .. } => ErrorKind::NonConvergence,
            molrss::Error::Unachievable { .. } => ErrorKind::Unachievable,
            _ => ErrorKind::Config,
        };
        Self {
            kind,
            message: err.to_string(),
        }
    }
}
