use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A column lies (numerically) in the span of the columns before it.
    #[error("rank deficient: column {column} lies in the span of the previous columns")]
    RankDeficient { column: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("trace has no iterations")]
    EmptyTrace,

    #[error("enumeration of {count} subsets exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("exact recovery condition violated: erc = {erc}")]
    ErcViolated { erc: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
