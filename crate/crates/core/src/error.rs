use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: u32, n: usize },

    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<u32>, reason: String },

    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<u32>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("numerical breakdown: {0}")]
    Numerical(String),

    #[error("{n} vertices exceeds the supported maximum of {max} for this operation")]
    TooManyVertices { n: usize, max: usize },

    #[error("search space exceeded budget: {examined} candidates examined, budget {budget}")]
    BudgetExceeded { examined: u64, budget: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
