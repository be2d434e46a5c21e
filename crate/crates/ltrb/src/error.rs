use std::io;
use std::path::PathBuf;

use ltrb_core::Error as CoreError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    ConfigSyntax { path: PathBuf, line: usize, msg: String },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("config key `{key}` (line {line}): {msg}")]
    ConfigValue { key: String, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },

    #[error("{0}")]
    Incompatible(String),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for
    /// basis/discretization mismatches, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigSyntax { .. } | CliError::MissingKey(_) | CliError::ConfigValue { .. } => 2,
            CliError::Incompatible(_) => 4,
            CliError::Core { source, .. } => match root(source) {
                CoreError::IncompatibleBasis { .. } => 4,
                CoreError::InvalidArgument(_) | CoreError::InvalidMesh(_) => 2,
                _ => 3,
            },
            CliError::Io { .. } | CliError::Format { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

fn root(e: &CoreError) -> &CoreError {
    match e {
        CoreError::NodeFailure { source, .. } => root(source),
        other => other,
    }
}

/// Attaches a phase description to core errors.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, CoreError> {
    fn context(self, what: impl Into<String>) -> Result<T> {
        self.map_err(|source| CliError::Core { context: what.into(), source })
    }
}
