use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("operator order mismatch")]
    OrderMismatch,
    #[error("verification failure: {0}")]
    VerificationFailure(String),
    #[error("chain annihilated the state (relative norm {0:.3e})")]
    Annihilated(f64),
    #[error("step size underflow at x = {0}")]
    StepUnderflow(f64),
    #[error("potential does not decay: |Q| = {0:.3e} at the domain edge")]
    DecayViolated(f64),
    #[error("zeta singularity: min |phi1 - i phi2| = {0:.3e} in the window")]
    ZetaSingularity(f64),
    #[error("level-set tracking failed: {0}")]
    TrackingFailure(String),
    #[error("missing analytic derivative of a coefficient (order {0})")]
    MissingDerivative(u32),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
