use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different towers")]
    OwnerMismatch,
    #[error("polynomial is not separable over the tower: {0}")]
    NotSeparable(String),
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("idempotent is 0 or 1")]
    TrivialIdempotent,
    #[error("divisor is not monic")]
    NotMonic,
    #[error("polynomial is constant")]
    Constant,
    #[error("both operands are zero")]
    BothZero,
    #[error("polynomials are not coprime")]
    NotCoprime,
    #[error("constant term is not a unit")]
    NonUnitConstantTerm,
    #[error("coefficient below the slope line is nonzero: alpha_{index} at order {order}")]
    SlopeViolation { index: usize, order: usize },
    #[error("no unit coefficient found within fuel {0} (input probably not separable)")]
    FuelExhausted(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("input is not separable: gcd(F, dF/dY) = {0}")]
    NotSeparableInput(String),
    #[error("input is not monic in Y (leading coefficient {0})")]
    NotMonicInY(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("map is not an endomorphism")]
    NotEndomorphism,
    #[error("the algebras do not split each other")]
    DoNotSplitEachOther,
}

pub type Result<T> = std::result::Result<T, Error>;
