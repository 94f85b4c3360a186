use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("mixed radicands: sqrt({left}) and sqrt({right})")]
    MixedRadicand { left: u64, right: u64 },

    #[error("radicand {0} is not a squarefree integer greater than 1")]
    BadRadicand(u64),

    #[error("{value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: String, lo: String, hi: String },

    #[error("malformed domain: {0}")]
    Domain(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid weights ({a}, {b}): {reason}")]
    InvalidWeights { a: u64, b: u64, reason: String },

    #[error("weights ({a}, {b}) violate the chamber sqrt(3)/2 * a < b <= a")]
    ChamberViolation { a: u64, b: u64 },

    #[error("unknown curve {0:?}")]
    UnknownCurve(String),

    #[error("curve {curve:?} has self-intersection {self_int}, not -1")]
    NotContractible { curve: String, self_int: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("t = {t} lies outside [0, {tau}]")]
    OutOfRange { t: String, tau: String },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}
