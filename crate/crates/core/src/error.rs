//! Error types, one enum per pipeline stage.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing column `{0}` in input")]
    MissingColumn(String),
    #[error("type mismatch in column `{column}` at row {row}: cannot parse `{value}`")]
    TypeMismatch {
        column: String,
        row: usize,
        value: String,
    },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute `{0}` used with mismatching kind")]
    KindMismatch(String),
    #[error("column `{0}` has wrong length")]
    LengthMismatch(String),
    #[error("model attribute `{0}` must be numeric")]
    NonNumericModelAttribute(String),
    #[error("duplicate selector for attribute `{0}` in description")]
    DuplicateSelector(String),
    #[error("invalid interval: lo {lo} must be < hi {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid binning request: {0}")]
    InvalidBinning(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model class mismatch")]
    ClassMismatch,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("singular model after ridge floor")]
    SingularModel,
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("empty subgroup")]
    EmptySubgroup,
    #[error("measure `{measure}` is incompatible with model class `{class}`")]
    Incompatible { measure: String, class: String },
    #[error("measure requires cached subgroup points")]
    PointsRequired,
    #[error("measure requires a dataset scale for Cook's distance")]
    ScaleRequired,
    #[error("residual variance is zero after flooring")]
    ZeroVariance,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("dataset has no describing attributes")]
    NoDescribingAttributes,
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("rejection sampling budget of {0} draws exhausted")]
    RejectionBudget(usize),
    #[error("not enough non-member rows for pollution: need {need}, have {have}")]
    InsufficientRows { need: usize, have: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("experiment grid is invalid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
