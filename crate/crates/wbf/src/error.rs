use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable-count mismatch: {0}")]
    VariableMismatch(String),
    #[error("algebra signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("zero operator has no {0}")]
    ZeroOperator(&'static str),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("weight vector must be nonzero")]
    ZeroWeight,
    #[error("term order is not admissible: {0}")]
    NonAdmissibleOrder(String),
    #[error("resource cap exceeded: {0} (retry with a larger budget)")]
    ResourceCap(String),
    #[error("b-function degree cap {0} exceeded (suspected non-holonomic input or exhausted budget)")]
    DegreeCap(usize),
    #[error("dimension {0} exceeds the supported bound ({1})")]
    DimensionBound(usize, usize),
    #[error("{0}")]
    InvalidInput(String),
    #[error("specialization guard violated: {0} lies in {1}+1+N (minimal integer root {1}); pass force to override (unsound)")]
    SpecializationGuard(i64, i64),
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
