use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
///
/// Each variant corresponds to one failure class; the CLI reports the
/// variant name on standard error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator polynomial is identically zero")]
    ZeroDenominator,
    #[error("polynomial degree {degree} exceeds the supported maximum of {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("delay must be finite and non-negative, got {0}")]
    InvalidDelay(f64),
    #[error("cannot combine transfer functions with unequal delays ({0} s and {1} s)")]
    MixedDelay(f64, f64),
    #[error("feedback loop denominator vanishes identically")]
    DegenerateLoop,
    #[error("evaluation at omega = {omega} rad/s hits a pole on the imaginary axis")]
    PoleOnAxis { omega: f64 },
    #[error("frequency must be strictly positive, got {0}")]
    InvalidFrequency(f64),
    #[error("operation requires a delay-free transfer function (delay = {0} s)")]
    DelayNotSupported(f64),
    #[error("root polishing failed: residual {residual:e} above tolerance {tolerance:e}")]
    Convergence { residual: f64, tolerance: f64 },
    #[error("transfer function is not proper (numerator degree {num} > denominator degree {den})")]
    NotProper { num: usize, den: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("delay {delay} s is not an integer multiple of the sample time {step} s")]
    DelayNotMultiple { delay: f64, step: f64 },
    #[error("simulation diverged at t = {time} s (|x| = {magnitude:e} m)")]
    Divergence { time: f64, magnitude: f64 },
    #[error("no stability bracket: both ends of [{lo}, {hi}] are {state}")]
    NoBracket { lo: f64, hi: f64, state: &'static str },
    #[error("no contact found in the trace")]
    NoContact,
    #[error("trace is empty")]
    EmptyTrace,
}

impl Error {
    /// Short class name used in diagnostics (e.g. `DivergenceError`).
    pub fn class(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "ZeroDenominatorError",
            Error::DegreeOverflow { .. } => "DegreeError",
            Error::InvalidDelay(_) => "ValidationError",
            Error::MixedDelay(..) => "MixedDelayError",
            Error::DegenerateLoop => "DegenerateLoopError",
            Error::PoleOnAxis { .. } => "PoleOnAxisError",
            Error::InvalidFrequency(_) => "ValidationError",
            Error::DelayNotSupported(_) => "DelayError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::NotProper { .. } => "DegreeError",
            Error::InvalidParameter(_) => "ValidationError",
            Error::DelayNotMultiple { .. } => "DelayNotMultipleError",
            Error::Divergence { .. } => "DivergenceError",
            Error::NoBracket { .. } => "NoBracketError",
            Error::NoContact => "NoContactError",
            Error::EmptyTrace => "EmptyTraceError",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
