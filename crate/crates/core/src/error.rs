use thiserror::Error;

/// Failures raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Mach number {mach} is outside the growing range [{floor}, sqrt 2)")]
    MachOutOfRange { mach: f64, floor: f64 },

    #[error("no growing root: X1^2 = {x1_sq} <= 0 at Mach {mach}")]
    NoGrowingRoot { mach: f64, x1_sq: f64 },

    #[error("front value {value} exceeds the diffeomorphism bound 2")]
    FrontOutOfRange { value: f64 },

    #[error("Jacobian {jacobian} < 1/3 at x2 = {x2}")]
    JacobianViolation { jacobian: f64, x2: f64 },

    #[error("degenerate square-root branch: radicand {re} + {im}i has no root with positive real part")]
    DegenerateBranch { re: f64, im: f64 },

    #[error("tangential frequency is zero; the normal mode degenerates")]
    DegenerateMode,

    #[error("frequency tau = {re} + {im}i lies outside the root neighbourhood")]
    OutsideNeighborhood { re: f64, im: f64 },

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("quadrature failure: normalisation residual {residual:e} exceeds {tolerance:e}")]
    QuadratureFailure { residual: f64, tolerance: f64 },

    #[error("time step {dt} violates the stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("grid under-resolves the mode: Re(mu) * dx = {product} > 0.2")]
    UnderResolved { product: f64 },

    #[error("instability detected at t = {time}: log-norm grew by {growth} (allowed {allowed})")]
    InstabilityDetected { time: f64, growth: f64, allowed: f64 },

    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientData { got: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
