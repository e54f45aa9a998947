use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violates the documented precondition of an operation.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A pointwise evaluation (e.g. the ellipsoid projection) did not converge.
    #[error("evaluation failed at ({:.6}, {:.6}, {:.6}): {reason}", point[0], point[1], point[2])]
    Evaluation { point: [f64; 3], reason: String },

    #[error("config line {line}: key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
