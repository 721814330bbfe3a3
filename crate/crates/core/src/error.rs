use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinError {
    #[error("operator has {0} distinct degree offsets; expected exactly two")]
    NotAssumptionOne(usize),
    #[error("degenerate operator: {0}")]
    Degenerate(String),
    #[error("unsupported expression: {0}")]
    UnsupportedExpression(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment of order {0} is not available")]
    MomentUnavailable(i64),
    #[error("moment recurrence breaks down at k = {0}")]
    RecurrenceBreakdown(u64),
    #[error("need {needed} seed moments, got {got}")]
    NotEnoughSeeds { needed: usize, got: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("Mellin formula preconditions violated: {0}")]
    ValidityViolated(String),
    #[error("no probe point was admissible")]
    NoAdmissibleProbe,
    #[error("not supported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, SteinError>;
