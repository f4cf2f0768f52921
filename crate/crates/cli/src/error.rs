use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] xxz_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("could not build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable description for the failure record.
    pub fn diagnostic(&self) -> Value {
        use xxz_core::Error as E;
        let message = self.to_string();
        match self {
            CliError::Core(e) => match e {
                E::NotConverged {
                    iterations,
                    best,
                    residuals,
                } => json!({
                    "kind": "not_converged",
                    "message": message,
                    "iterations": iterations,
                    "best": best,
                    "residuals": residuals,
                }),
                E::TooLarge { what, size, limit, .. } => json!({
                    "kind": "too_large",
                    "message": message,
                    "what": what,
                    "size": size,
                    "limit": limit,
                }),
                E::EnlargeWindow { mu, window } => json!({
                    "kind": "enlarge_window",
                    "message": message,
                    "mu": mu,
                    "window": window,
                }),
                E::Domain(_) | E::LengthMismatch { .. } => json!({"kind": "domain", "message": message}),
                _ => json!({"kind": "numerical", "message": message}),
            },
            CliError::Usage(_) => json!({"kind": "usage", "message": message}),
            _ => json!({"kind": "io", "message": message}),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
