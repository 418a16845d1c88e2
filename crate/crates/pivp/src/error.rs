use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("precision/range exhausted: {0}")]
    RangeExhausted(String),

    #[error("insufficient horizon: tail bound never drops below target within {max_terms} terms")]
    InsufficientHorizon { max_terms: u64 },

    #[error("quadrature failure on [{lo}, {hi}]: {reason}")]
    QuadratureFailure { lo: String, hi: String, reason: String },

    #[error("non-liftable parameter at node: {0}")]
    NonLiftableParameter(String),

    #[error("rejected input: {0}")]
    Rejected(String),

    #[error("horizon exceeded: t={t} beyond verified range {limit}")]
    HorizonExceeded { t: String, limit: String },

    #[error("certificate violated: {condition}")]
    Certificate { condition: String },

    #[error("step size underflow at t={t}: {diagnostic}")]
    StepUnderflow { t: String, diagnostic: String },

    #[error("integration budget exceeded after {steps} steps at t={t}")]
    BudgetExceeded { steps: u64, t: String },

    #[error("division by an interval containing zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
