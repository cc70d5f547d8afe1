//! Scalar helpers over `libm`.

pub(crate) use libm::{exp, expm1, fabs, log, log1p, pow, sqrt};

/// `expm1(u) / u`, continuous through `u = 0`.
#[inline]
pub(crate) fn expm1_ratio(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        expm1(u) / u
    }
}

/// `log1p(v) / v`, continuous through `v = 0`. Requires `v > -1`.
#[inline]
pub(crate) fn log1p_ratio(v: f64) -> f64 {
    if v == 0.0 {
        1.0
    } else {
        log1p(v) / v
    }
}

/// Natural log of |Gamma(x)| and the sign of Gamma(x).
#[inline]
pub(crate) fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (lg, sign) = libm::lgamma_r(x);
    (lg, if sign < 0 { -1.0 } else { 1.0 })
}

#[inline]
pub(crate) fn is_integer(x: f64) -> bool {
    x.is_finite() && libm::floor(x) == x
}

/// `max(1, |x|)`, the usual scale for mixed absolute/relative tolerances.
#[inline]
pub(crate) fn unit_scale(x: f64) -> f64 {
    let a = fabs(x);
    if a > 1.0 {
        a
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_are_continuous_at_zero() {
        assert_eq!(expm1_ratio(0.0), 1.0);
        assert_eq!(log1p_ratio(0.0), 1.0);
        assert!((expm1_ratio(1e-12) - 1.0).abs() < 1e-12);
        assert!((log1p_ratio(-1e-12) - 1.0).abs() < 1e-12);
        assert!((expm1_ratio(1.0) - (core::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn signed_log_gamma() {
        let (lg, s) = ln_gamma_signed(-0.5);
        // Gamma(-1/2) = -2 sqrt(pi)
        assert_eq!(s, -1.0);
        assert!((lg - log(2.0 * sqrt(core::f64::consts::PI))).abs() < 1e-14);
    }
}
