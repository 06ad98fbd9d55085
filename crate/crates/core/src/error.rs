use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("kernel is not subcritical: L1 norm {l1} >= 1")]
    Unstable { l1: f64 },

    #[error("no real solution of the fixed point equation for theta = {theta} > theta_c = {theta_c}")]
    NoRealSolution { theta: f64, theta_c: f64 },

    #[error("Volterra time stepping diverged at t = {t} (theta too close to theta_c for this grid)")]
    Diverged { t: f64 },

    #[error("tail integral did not converge before the maximum horizon {horizon}")]
    HorizonExhausted { horizon: f64 },

    #[error("saddle point sits at theta_c: x(theta*) * ||h|| = {product}")]
    SingularSaddle { product: f64 },

    #[error("t * x = {tx} is not an integer")]
    LatticeViolation { tx: f64 },

    #[error("level {x} is not above the mean rate {mean}")]
    NotAboveMean { x: f64, mean: f64 },

    #[error("derivative ladder of order {needed} required, only {available} available")]
    MissingLadder { needed: usize, available: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
