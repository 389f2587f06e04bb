use serde::Serialize;
use thiserror::Error;

/// Failure classes of the command-line tool, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable input, bad flags, or violated preconditions (exit 1).
    #[error("{0}")]
    Input(String),
    /// Iteration budget exhausted or a numerical routine failed (exit 2).
    #[error("{message}")]
    Numerical {
        message: String,
        partial: Option<serde_json::Value>,
    },
    /// Matrix order above the permanent cap (exit 3).
    #[error("matrix order {n} exceeds the permanent cap {cap}")]
    Cap { n: usize, cap: usize },
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical { .. } => 2,
            CliError::Cap { .. } => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Numerical { .. } => "numerical",
            CliError::Cap { .. } => "cap_exceeded",
        }
    }

    /// The structured error object printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
            exit_code: i32,
            #[serde(skip_serializing_if = "Option::is_none")]
            partial: Option<&'a serde_json::Value>,
        }
        let partial = match self {
            CliError::Numerical { partial, .. } => partial.as_ref(),
            _ => None,
        };
        serde_json::json!({ "error": Body {
            kind: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
            partial,
        }})
    }
}

impl From<permascale::Error> for CliError {
    fn from(e: permascale::Error) -> Self {
        use permascale::Error as E;
        match e {
            E::CapExceeded { n, cap } => CliError::Cap { n, cap },
            E::MaxIterExceeded(u) => CliError::Numerical {
                message: format!(
                    "no convergence after {} iterations (residual {:e})",
                    u.iterations, u.residual
                ),
                partial: Some(serde_json::json!({
                    "iterations": u.iterations,
                    "residual": u.residual,
                    "row_scaling": u.row_scaling,
                    "col_scaling": u.col_scaling,
                })),
            },
            E::Internal(_) | E::BracketFailure => CliError::Numerical {
                message: e.to_string(),
                partial: None,
            },
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
