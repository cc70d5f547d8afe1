//! Principal branch of the Lambert W function on `[-1/e, inf)`.

use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log1p, sqrt};

const INV_E: f64 = 0.367_879_441_171_442_33;
const MAX_HALLEY_STEPS: usize = 64;

/// `W0(x)`: the solution `w >= -1` of `w e^w = x`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite { what: "Lambert W argument" });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let shifted = x + INV_E;
    if shifted < 0.0 {
        // -1/e itself is not representable; allow one rounding of slack
        if shifted < -2.0 * f64::EPSILON * INV_E {
            return Err(Error::LambertDomain { x, level: None });
        }
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = exp(w);
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if f == 0.0 || wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if fabs(step) <= 4.0 * f64::EPSILON * (1.0 + fabs(w)) {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.32 {
        // expansion around the branch point, p = sqrt(2 (e x + 1))
        let p = sqrt((2.0 * (core::f64::consts::E * x + 1.0)).max(0.0));
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
    } else if x < 3.0 {
        // Winitzki-style approximation
        let l = log1p(x);
        l * (1.0 - log1p(l) / (2.0 + l))
    } else {
        let l1 = log(x);
        let l2 = log(l1);
        l1 - l2 + l2 / l1
    }
}
