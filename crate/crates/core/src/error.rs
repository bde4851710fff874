use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty population")]
    EmptyPopulation,

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("corrupt CBF: {0}")]
    CorruptCbf(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("inconsistent column count at line {line}: expected {expected} fields, found {found}")]
    InconsistentColumns {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("parse error at ({row}, {col}): {value:?}")]
    Parse { row: usize, col: usize, value: String },

    #[error("matrix too narrow: {0} columns (need at least 3)")]
    MatrixTooNarrow(usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid chunk plan: {0}")]
    InvalidChunkPlan(String),

    #[error("scenario infeasible: {0}")]
    ScenarioInfeasible(String),

    #[error("undefined Jaccard: both biclusters are empty")]
    UndefinedJaccard,

    #[error("expected set of biclusters is empty")]
    EmptyExpected,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
