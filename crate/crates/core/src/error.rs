use thiserror::Error;

/// Errors raised by space construction, the operators and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("space must contain at least one point")]
    EmptySpace,

    #[error("weight at index {index} is {weight}; weights must be positive and finite")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquareMatrix { row: usize, len: usize, expected: usize },

    #[error("distance matrix is asymmetric at ({i}, {j}): {a} != {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },

    #[error("distance matrix has nonzero diagonal entry {value} at index {index}")]
    NonZeroDiagonal { index: usize, value: f64 },

    #[error("distance matrix entry ({i}, {j}) = {value} is negative or not finite")]
    InvalidDistance { i: usize, j: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cap radius must be positive and finite, got {0}")]
    InvalidCap(f64),

    #[error("radius must satisfy 0 < r <= cap ({cap}), got {radius}")]
    InvalidRadius { radius: f64, cap: f64 },

    #[error("point id {id} out of range for a space of {n} points")]
    PointOutOfRange { id: usize, n: usize },

    #[error("ball around {center} of radius {radius} has zero mass")]
    EmptyBall { center: String, radius: f64 },

    #[error("field has {found} values but the space has {expected} points")]
    FieldLength { found: usize, expected: usize },

    #[error("field is empty")]
    EmptyField,

    #[error("field value at index {index} is not finite")]
    NonFiniteValue { index: usize },

    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },

    #[error("gradient value at index {index} is negative ({value})")]
    NegativeGradient { index: usize, value: f64 },

    #[error(
        "brute-force oracle limited to {limit} points, space has {n}; \
         use the profile-based operators or raise the limit explicitly"
    )]
    OracleLimit { n: usize, limit: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("operation requires a {expected} space, got {found}")]
    WrongSpaceKind { expected: String, found: String },

    #[error("operation requires point coordinates; space is given by an explicit matrix")]
    NeedsCoordinates,

    #[error("hypothesis not satisfied for {experiment}: {condition}")]
    Hypothesis { experiment: &'static str, condition: String },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
