use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is multi-labeled; use the multi-label average filtration (avg-mlt) instead")]
    MultiLabeled,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Prefixes the message with `ctx`, keeping the category.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{ctx}: {message}"),
            },
            Error::InvalidInput(m) => Error::InvalidInput(format!("{ctx}: {m}")),
            Error::MultiLabeled => Error::InvalidInput(format!("{ctx}: {}", Error::MultiLabeled)),
            Error::Infeasible(m) => Error::Infeasible(format!("{ctx}: {m}")),
            Error::Resource(m) => Error::Resource(format!("{ctx}: {m}")),
            Error::Invariant(m) => Error::Invariant(format!("{ctx}: {m}")),
            io @ Error::Io { .. } => io,
        }
    }

    /// Short machine-readable category used by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::InvalidInput(_) | Error::MultiLabeled => "usage",
            Error::Infeasible(_) => "infeasible",
            Error::Resource(_) => "resource",
            Error::Invariant(_) => "internal",
        }
    }
}
