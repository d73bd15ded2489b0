use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// `Parse`/`Shape`/`Domain`/`Singular` are malformed-input class errors,
/// `Guard` is the resource-guard class.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("size guard exceeded: {what} = {requested} is over the limit {limit} (set ARTIFACT_MAX_DIM to raise it)")]
    Guard {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
