use std::path::PathBuf;

/// Failure classes shared by every module. The variant names mirror how a
/// caller is expected to react: fix arguments, fix configuration, fix the
/// environment, or retry.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("layout failed: {0}")]
    Layout(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("environment: {0}")]
    Environment(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unsupported task: {0}")]
    UnsupportedTask(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
