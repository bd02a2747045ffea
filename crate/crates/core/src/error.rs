use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{op}: unimputed gaps ({count} missing samples); interpolate first")]
    MissingValues { op: &'static str, count: usize },

    #[error("{op}: input too short, need at least {needed} samples but got {got}")]
    TooShort {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0}")]
    Record(String),

    #[error("csv {path}: {message}")]
    Csv { path: String, message: String },

    #[error("wfdb header: {0}")]
    Header(String),

    #[error("unsupported WFDB signal format {0} (supported: 16, 212)")]
    UnsupportedFormat(u16),

    #[error("signal data: partial frame at byte offset {offset}")]
    PartialFrame { offset: usize },

    #[error("signal data: {0}")]
    SignalData(String),

    #[error("record not found: {url}")]
    NotFound { url: String },

    #[error("transport error for {url}: {message}")]
    Transport { url: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
