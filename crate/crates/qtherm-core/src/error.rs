use alloc::boxed::Box;
use core::fmt;

use crate::maxent::MaxEntSolution;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the numerical core.
///
/// Variants fall into two families: argument/domain problems (the inputs are
/// outside the set where a formula is defined) and solver failures (a root or
/// fixed point could not be produced). [`Error::is_solver_failure`] separates
/// the two.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument was NaN or infinite.
    NonFinite { what: &'static str },
    /// The group parameter alpha was zero.
    ZeroScale,
    /// A parameter violates its documented range.
    InvalidParameter { what: &'static str, reason: &'static str },
    /// The operation is undefined at these arguments.
    Domain { op: &'static str, reason: &'static str },
    /// A denominator vanished.
    Pole { op: &'static str },
    /// The result overflowed to a non-finite value.
    Overflow { op: &'static str },
    /// One side of an identity is defined and the other is not.
    DomainMismatch { identity: &'static str },
    /// A probability vector failed validation.
    InvalidDistribution { reason: &'static str, index: Option<usize> },
    /// Two vectors that must align have different lengths.
    LengthMismatch { expected: usize, found: usize },
    /// The trinomial `1 - x + b x^alpha = 0` has no real root on the branch
    /// through `x(0) = 1`. `level` is set when raised inside a MaxEnt sweep.
    NoRealRoot { alpha: f64, b: f64, level: Option<usize> },
    /// The generalized-binomial series does not converge at this `b`.
    DivergentSeries { alpha: f64, b: f64, terms_used: usize },
    /// Lambert W argument below `-1/e`.
    LambertDomain { x: f64, level: Option<usize> },
    /// A target escort mean outside the spectrum range.
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    /// No multiplier in the search bracket reproduces the target mean.
    TargetUnreachable { target: f64, lo: f64, hi: f64 },
    /// The fixed-point iteration hit its cap. The last iterate is attached.
    NonConvergence { partial: Box<MaxEntSolution> },
}

impl Error {
    /// True for failures of an iterative or root-finding procedure, as opposed
    /// to invalid input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NoRealRoot { .. }
                | Error::DivergentSeries { .. }
                | Error::LambertDomain { .. }
                | Error::TargetUnreachable { .. }
                | Error::NonConvergence { .. }
        )
    }

    pub(crate) fn at_level(self, level: usize) -> Self {
        match self {
            Error::NoRealRoot { alpha, b, .. } => Error::NoRealRoot { alpha, b, level: Some(level) },
            Error::LambertDomain { x, .. } => Error::LambertDomain { x, level: Some(level) },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { what } => write!(f, "{what} must be finite"),
            Error::ZeroScale => write!(f, "alpha must be nonzero"),
            Error::InvalidParameter { what, reason } => write!(f, "invalid {what}: {reason}"),
            Error::Domain { op, reason } => write!(f, "{op}: {reason}"),
            Error::Pole { op } => write!(f, "{op}: pole (zero denominator)"),
            Error::Overflow { op } => write!(f, "{op}: result is not finite"),
            Error::DomainMismatch { identity } => {
                write!(f, "{identity}: only one side of the identity is defined")
            }
            Error::InvalidDistribution { reason, index: Some(i) } => {
                write!(f, "invalid distribution at entry {i}: {reason}")
            }
            Error::InvalidDistribution { reason, index: None } => {
                write!(f, "invalid distribution: {reason}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NoRealRoot { alpha, b, level } => {
                write!(f, "no real root of 1 - x + b x^alpha = 0 for alpha = {alpha}, b = {b}")?;
                if let Some(i) = level {
                    write!(f, " (level {i})")?;
                }
                Ok(())
            }
            Error::DivergentSeries { alpha, b, terms_used } => {
                write!(f, "trinomial series diverges for alpha = {alpha}, b = {b} after {terms_used} terms")
            }
            Error::LambertDomain { x, level } => {
                write!(f, "Lambert W argument {x} is below -1/e")?;
                if let Some(i) = level {
                    write!(f, " (level {i})")?;
                }
                Ok(())
            }
            Error::TargetOutOfRange { target, min, max } => {
                write!(f, "target mean {target} outside spectrum range [{min}, {max}]")
            }
            Error::TargetUnreachable { target, lo, hi } => {
                write!(f, "no multiplier in [{lo}, {hi}] reaches target mean {target}")
            }
            Error::NonConvergence { partial } => {
                write!(f, "fixed-point iteration did not converge in {} sweeps", partial.iterations)
            }
        }
    }
}

impl core::error::Error for Error {}
