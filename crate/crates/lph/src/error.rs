use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("wrong regime: {0}")]
    Regime(String),
    #[error("outside series validity: {0}")]
    Validity(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("singular derivative: {0}")]
    SingularDerivative(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("divergence probe failed: {0}")]
    ProbeFailure(String),
    #[error("integration failed: {message} (achieved {achieved:e})")]
    Integration { message: String, achieved: f64 },
    #[error("range error: {0}")]
    Range(String),
    #[error("counterexample check failed: {0}")]
    CounterexampleFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
