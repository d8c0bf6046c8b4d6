use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] tensorfill_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for inputs the
    /// estimators cannot work with, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        use tensorfill_core::Error as E;
        match self {
            Error::Config(_) | Error::Core(E::Config(_)) => 2,
            Error::Parse { .. } | Error::Infeasible(_) | Error::Core(_) => 3,
            Error::Io { .. } | Error::Csv(_) => 1,
        }
    }
}
