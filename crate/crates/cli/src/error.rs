use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Config { field: Option<String>, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] hessian_bellman::Error),
    #[error("{0}")]
    Ladder(String),
}

impl CliError {
    pub(crate) fn syntax(line: usize, message: &str) -> Self {
        CliError::Config { field: None, message: format!("line {line}: {message}") }
    }

    pub(crate) fn missing(section: &str, key: &str) -> Self {
        CliError::Config { field: Some(format!("{section}.{key}")), message: format!("missing field `{key}` in [{section}]") }
    }

    pub(crate) fn invalid(section: &str, key: &str, line: usize, message: &str) -> Self {
        let at = if line > 0 { format!("line {line}: ") } else { String::new() };
        CliError::Config {
            field: Some(format!("{section}.{key}")),
            message: format!("{at}invalid `{key}` in [{section}]: {message}"),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        use hessian_bellman::Error as E;
        match self {
            CliError::Config { .. } | CliError::Core(E::Config(_)) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(E::NonConvergence { .. }) | CliError::Ladder(_) => "non-convergence",
            CliError::Core(E::Argument(_)) => "argument",
            CliError::Core(E::Domain(_)) => "domain",
            CliError::Core(E::Numeric(_)) | CliError::Core(E::CrossCheck(_)) => "numeric",
        }
    }

    /// Offending config field as `section.key`, when known.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Config { field, .. } => field.as_deref(),
            _ => None,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" | "argument" | "io" => 2,
            _ => 3,
        }
    }
}
