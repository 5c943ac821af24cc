use thiserror::Error;

/// Errors surfaced by the optimizer kernels, problem builders and auditors.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter combinations (bad beta, nonpositive weights, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Inputs rejected at the boundary, e.g. non-finite gradient entries.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// An operation was invoked on a state that cannot support it.
    #[error("state error: {0}")]
    State(String),

    /// A fixed-horizon stepsize schedule was queried past its horizon.
    #[error("stepsize horizon exceeded: step {step} > horizon {horizon}")]
    HorizonExceeded { step: usize, horizon: usize },

    /// Malformed text input; positions are 1-based.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    /// A verified construction failed one of its structural checks.
    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
