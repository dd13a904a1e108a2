use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("non-positive element {0}; only positive rationals are allowed")]
    NonPositive(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error(
        "set of size {size} exceeds the quadruple oracle cap {cap}; use the ratio-profile method"
    )]
    OracleCapExceeded { size: usize, cap: usize },

    #[error("enumeration of {required} points exceeds the budget {budget}; try a set with at most {suggested} elements")]
    BudgetExceeded {
        required: u128,
        budget: u128,
        suggested: usize,
    },

    #[error("|A| = {a} < |B| = {b}; swap the roles of A and B")]
    SwapRequired { a: usize, b: usize },

    #[error("degenerate point set: affine hull has dimension {hull_dim} < {dim}")]
    DegeneratePointSet { hull_dim: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
