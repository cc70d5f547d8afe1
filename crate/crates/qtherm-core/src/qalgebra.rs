//! q-deformed arithmetic and the rescaling distributive laws.
//!
//! ```text
//! x (+)q y = x + y + (1-q) x y
//! x (-)q y = (x - y) / (1 + (1-q) y)
//! x (*)q y = [x^(1-q) + y^(1-q) - 1]^(1/(1-q))
//! x (/)q y = [x^(1-q) - y^(1-q) + 1]^(1/(1-q))
//! exp_q x  = [1 + (1-q) x]^(1/(1-q))
//! ln_q x   = (x^(1-q) - 1) / (1-q)
//! ```
//!
//! The power forms have a removable singularity at `q = 1`. They are
//! evaluated as `ln_q x = ln x * expm1(u)/u` with `u = (1-q) ln x` and
//! `exp_q x = exp(x * log1p(v)/v)` with `v = (1-q) x`, which is accurate for
//! every `q` and reduces to the ordinary functions exactly at `q = 1`.
//! The product and quotient go through `exp_q(ln_q x +- ln_q y)`, whose
//! bracket is identical to the power form.
//!
//! Cutoff convention: where the bracket `1 + (1-q) u` is non-positive,
//! `exp_q` and `(*)q` return 0 for `q < 1` and fail for `q > 1`. The quotient
//! never cuts off.

use crate::deformation::{transform, DeformParam, ScaleFactor};
use crate::error::{Error, Result};
use crate::math::{exp, expm1_ratio, fabs, log, log1p_ratio, pow, unit_scale};

#[inline]
fn finite(v: f64, op: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { op })
    }
}

fn check_args(x: f64, y: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "x" });
    }
    if !y.is_finite() {
        return Err(Error::NonFinite { what: "y" });
    }
    Ok(())
}

/// `x + y + (1-q) x y`.
pub fn q_add(x: f64, y: f64, q: DeformParam) -> Result<f64> {
    check_args(x, y)?;
    finite(x + y + q.coupling() * (x * y), "q_add")
}

/// `(x - y) / (1 + (1-q) y)`; the pole sits at `y = 1/(q-1)`.
pub fn q_sub(x: f64, y: f64, q: DeformParam) -> Result<f64> {
    check_args(x, y)?;
    let t = q.coupling() * y;
    let denom = 1.0 + t;
    if fabs(denom) <= 4.0 * f64::EPSILON * unit_scale(t) {
        return Err(Error::Pole { op: "q_sub" });
    }
    finite((x - y) / denom, "q_sub")
}

/// `exp_q x`, with the cutoff convention described in the module docs.
pub fn q_exp(x: f64, q: DeformParam) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "x" });
    }
    exp_q_unchecked(x, q, "q_exp")
}

fn exp_q_unchecked(u: f64, q: DeformParam, op: &'static str) -> Result<f64> {
    let v = q.coupling() * u;
    if v <= -1.0 {
        return if q.offset() < 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Domain { op, reason: "1 + (1-q) x <= 0 with q > 1" })
        };
    }
    finite(exp(u * log1p_ratio(v)), op)
}

/// `ln_q x` for `x > 0`.
pub fn q_log(x: f64, q: DeformParam) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "x" });
    }
    if x <= 0.0 {
        return Err(Error::Domain { op: "q_log", reason: "argument must be positive" });
    }
    let l = log(x);
    finite(l * expm1_ratio(q.coupling() * l), "q_log")
}

fn positive_operands(x: f64, y: f64, op: &'static str) -> Result<()> {
    check_args(x, y)?;
    if x <= 0.0 || y <= 0.0 {
        return Err(Error::Domain { op, reason: "operands must be positive" });
    }
    Ok(())
}

/// `[x^(1-q) + y^(1-q) - 1]^(1/(1-q))` for positive operands.
pub fn q_mul(x: f64, y: f64, q: DeformParam) -> Result<f64> {
    positive_operands(x, y, "q_mul")?;
    let u = q_log(x, q)? + q_log(y, q)?;
    exp_q_unchecked(u, q, "q_mul")
}

/// `[x^(1-q) - y^(1-q) + 1]^(1/(1-q))` for positive operands. A non-positive
/// bracket is a domain error for every `q`.
pub fn q_div(x: f64, y: f64, q: DeformParam) -> Result<f64> {
    positive_operands(x, y, "q_div")?;
    let u = q_log(x, q)? - q_log(y, q)?;
    if q.coupling() * u <= -1.0 {
        return Err(Error::Domain { op: "q_div", reason: "bracket x^(1-q) - y^(1-q) + 1 <= 0" });
    }
    exp_q_unchecked(u, q, "q_div")
}

/// Both sides of an identity, each evaluated along its own route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    /// Default relative tolerance for the rescaling identities.
    pub const TOLERANCE: f64 = 1e-12;

    pub fn gap(&self) -> f64 {
        fabs(self.lhs - self.rhs)
    }

    /// `|lhs - rhs| <= rel_tol * max(1, |lhs|)`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.gap() <= rel_tol * unit_scale(self.lhs)
    }
}

fn pair(identity: &'static str, lhs: Result<f64>, rhs: Result<f64>) -> Result<IdentityCheck> {
    match (lhs, rhs) {
        (Ok(lhs), Ok(rhs)) => Ok(IdentityCheck { lhs, rhs }),
        (Err(e), Err(_)) => Err(e),
        _ => Err(Error::DomainMismatch { identity }),
    }
}

/// `alpha (x (+)q y)` against `(alpha x) (+)q_alpha (alpha y)`.
pub fn dist_add(x: f64, y: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    let a = alpha.value();
    let qa = transform(q, alpha)?;
    let lhs = q_add(x, y, q).and_then(|s| finite(a * s, "dist_add"));
    let rhs = q_add(a * x, a * y, qa);
    pair("dist_add", lhs, rhs)
}

/// `alpha (x (-)q y)` against `(alpha x) (-)q_alpha (alpha y)`.
pub fn dist_sub(x: f64, y: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    let a = alpha.value();
    let qa = transform(q, alpha)?;
    let lhs = q_sub(x, y, q).and_then(|s| finite(a * s, "dist_sub"));
    let rhs = q_sub(a * x, a * y, qa);
    pair("dist_sub", lhs, rhs)
}

fn power(base: f64, alpha: ScaleFactor, op: &'static str) -> Result<f64> {
    finite(pow(base, alpha.value()), op)
}

/// `(x (*)q y)^alpha` against `x^alpha (*)q_alpha y^alpha`.
pub fn dist_mul(x: f64, y: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    positive_operands(x, y, "dist_mul")?;
    let qa = transform(q, alpha)?;
    let lhs = q_mul(x, y, q).and_then(|m| power(m, alpha, "dist_mul"));
    let rhs = (|| q_mul(power(x, alpha, "dist_mul")?, power(y, alpha, "dist_mul")?, qa))();
    pair("dist_mul", lhs, rhs)
}

/// `(x (/)q y)^alpha` against `x^alpha (/)q_alpha y^alpha`.
pub fn dist_div(x: f64, y: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    positive_operands(x, y, "dist_div")?;
    let qa = transform(q, alpha)?;
    let lhs = q_div(x, y, q).and_then(|m| power(m, alpha, "dist_div"));
    let rhs = (|| q_div(power(x, alpha, "dist_div")?, power(y, alpha, "dist_div")?, qa))();
    pair("dist_div", lhs, rhs)
}

/// `(exp_q x)^alpha` against `exp_{q_alpha}(alpha x)`.
pub fn exp_scaling(x: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    let qa = transform(q, alpha)?;
    let lhs = q_exp(x, q).and_then(|e| power(e, alpha, "exp_scaling"));
    let rhs = q_exp(alpha.value() * x, qa);
    pair("exp_scaling", lhs, rhs)
}

/// `alpha ln_q x` against `ln_{q_alpha}(x^alpha)`.
pub fn log_scaling(x: f64, q: DeformParam, alpha: ScaleFactor) -> Result<IdentityCheck> {
    let qa = transform(q, alpha)?;
    let lhs = q_log(x, q).map(|l| alpha.value() * l);
    let rhs = if x > 0.0 { power(x, alpha, "log_scaling").and_then(|p| q_log(p, qa)) } else { q_log(x, qa) };
    pair("log_scaling", lhs, rhs)
}
