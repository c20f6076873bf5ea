use std::path::PathBuf;

/// Failures reading or writing the on-disk formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: row {row}, column {column}: cannot parse '{value}' as a number", path.display())]
    Parse { path: PathBuf, row: usize, column: String, value: String },
    #[error("{}: row {row}, column {column}: value '{value}' is not finite", path.display())]
    NonFinite { path: PathBuf, row: usize, column: String, value: String },
    #[error("{}: {reason}", path.display())]
    Invalid { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        #[source]
        source: ghsom_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, FormatError>;
