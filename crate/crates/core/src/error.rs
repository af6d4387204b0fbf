use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error at row {row}, column `{column}`: {message}")]
    Data {
        row: usize,
        column: String,
        message: String,
    },

    #[error("label error: {0}")]
    Label(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("rank error: {0}")]
    Rank(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("pilot sample contains a single class after {attempts} attempts")]
    DegeneratePilot { attempts: usize },

    #[error("information matrix is numerically singular (condition estimate {condition:e})")]
    SingularInformation { condition: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Error {
    /// Short stable token naming the variant, used to tag failed benchmark records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Data { .. } => "data",
            Error::Label(_) => "label",
            Error::Usage(_) => "usage",
            Error::Shape(_) => "shape",
            Error::Rank(_) => "rank",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegenerateLabels(_) => "degenerate_labels",
            Error::DegeneratePilot { .. } => "degenerate_pilot",
            Error::SingularInformation { .. } => "singular_information",
            Error::Degenerate(_) => "degenerate",
            Error::Numerical(_) => "numerical",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
