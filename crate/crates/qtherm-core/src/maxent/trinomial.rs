//! Roots of the trinomial `1 - x + b x^alpha = 0` on the branch through
//! `x(0) = 1`.
//!
//! Lagrange inversion of `x = 1 + b x^alpha` gives
//!
//! ```text
//! x = 1 + sum_{n >= 1} C(alpha n, n - 1) b^n / n
//! ```
//!
//! with generalized binomial coefficients. The branch point, where `f` and
//! `f'` vanish together, is `x* = alpha / (alpha - 1)`, `b* = x*^(1-alpha) /
//! alpha`, so the series converges for
//!
//! ```text
//! |b| < |alpha - 1|^(alpha - 1) / |alpha|^alpha
//! ```
//!
//! (1/4 at alpha = 2, 1 at alpha = 1, 2 at alpha = 1/2).

use crate::deformation::ScaleFactor;
use crate::error::{Error, Result};
use crate::math::{exp, fabs, is_integer, ln_gamma_signed, log, pow, sqrt, unit_scale};

/// Fraction of the convergence radius inside which [`solve_trinomial`]
/// trusts the series.
pub const SERIES_SAFETY: f64 = 0.9;

const MAX_SERIES_TERMS: usize = 4000;
const MAX_NEWTON_STEPS: usize = 200;

/// `1 - x + b x^alpha = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrinomialProblem {
    pub alpha: ScaleFactor,
    pub b: f64,
}

/// How a root was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    /// `alpha = 1`: `x = 1 / (1 - b)`.
    Linear,
    /// `alpha = 1/2`: quadratic in `sqrt(x)`.
    QuadraticInSqrt,
    /// `alpha = 2`: `x = (1 - sqrt(1 - 4b)) / (2b)`.
    Quadratic,
    /// Generalized-binomial series, polished by safeguarded Newton.
    Series { terms: usize },
    /// Safeguarded Newton on a bracket.
    Bracketed,
    /// `b = 0`.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrinomialRoot {
    pub x: f64,
    pub method: RootMethod,
    /// `|1 - x + b x^alpha|` at the returned root.
    pub residual: f64,
}

impl TrinomialProblem {
    pub fn new(alpha: ScaleFactor, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::NonFinite { what: "b" });
        }
        Ok(TrinomialProblem { alpha, b })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        1.0 - x + self.b * pow(x, self.alpha.value())
    }

    pub fn residual(&self, x: f64) -> f64 {
        fabs(self.eval(x))
    }

    pub fn solve(&self) -> Result<TrinomialRoot> {
        let x_and_method = self.dispatch()?;
        let (x, method) = x_and_method;
        Ok(TrinomialRoot { x, method, residual: self.residual(x) })
    }

    fn no_root(&self) -> Error {
        Error::NoRealRoot { alpha: self.alpha.value(), b: self.b, level: None }
    }

    fn dispatch(&self) -> Result<(f64, RootMethod)> {
        let a = self.alpha.value();
        let b = self.b;
        if b == 0.0 {
            return Ok((1.0, RootMethod::Trivial));
        }
        if a == 1.0 {
            if b == 1.0 {
                return Err(Error::Pole { op: "solve_trinomial" });
            }
            if b > 1.0 {
                return Err(self.no_root());
            }
            return Ok((1.0 / (1.0 - b), RootMethod::Linear));
        }
        if a == 0.5 {
            // s = sqrt(x) solves s^2 - b s - 1 = 0; take the positive root.
            let disc = sqrt(b * b + 4.0);
            let s = if b >= 0.0 { 0.5 * (b + disc) } else { 2.0 / (disc - b) };
            return Ok((s * s, RootMethod::QuadraticInSqrt));
        }
        if a == 2.0 {
            let disc = 1.0 - 4.0 * b;
            if disc < 0.0 {
                return Err(self.no_root());
            }
            // (1 - sqrt(d)) / (2b) rewritten without cancellation
            return Ok((2.0 / (1.0 + sqrt(disc)), RootMethod::Quadratic));
        }

        let bracket = self.bracket()?;
        let radius = series_radius(self.alpha);
        let mut method = RootMethod::Bracketed;
        let mut guess = 0.5 * (bracket.0 + bracket.1);
        if fabs(b) < SERIES_SAFETY * radius {
            if let Ok(sum) = trinomial_series(self.alpha, b, MAX_SERIES_TERMS, 0.25 * f64::EPSILON) {
                method = RootMethod::Series { terms: sum.terms_used };
                guess = sum.x;
            }
        } else if fabs(b) < radius {
            // truncated series as a seed only
            if let Ok(sum) = trinomial_series(self.alpha, b, 32, 1e-6) {
                guess = sum.x;
            }
        }
        let x = self.newton_in_bracket(bracket, guess);
        Ok((x, method))
    }

    /// A bracket `[lo, hi]` containing only the branch root, with `f(lo)` and
    /// `f(hi)` of opposite signs (or one of them zero).
    fn bracket(&self) -> Result<(f64, f64)> {
        let a = self.alpha.value();
        let b = self.b;
        if b < 0.0 && a > 0.0 {
            // f(0) = 1, f(1) = b < 0, f decreasing
            return Ok((0.0, 1.0));
        }
        if b > 0.0 && a > 1.0 {
            // convex with f(1) = b > 0; the branch root lies left of the minimum
            let xmin = pow(1.0 / (a * b), 1.0 / (a - 1.0));
            let fmin = self.eval(xmin);
            if fmin > 4.0 * f64::EPSILON * unit_scale(xmin) {
                return Err(self.no_root());
            }
            return Ok((1.0, xmin));
        }
        if b > 0.0 {
            // 0 < alpha < 1 (concave) or alpha < 0 (decreasing): f(1) = b > 0
            // and f -> -inf, one root above 1
            let mut hi = 2.0;
            while self.eval(hi) > 0.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(self.no_root());
                }
            }
            return Ok((1.0, hi));
        }
        // alpha < 0, b < 0: f(0+) = -inf, f(1) = b < 0, single maximum at xmax;
        // the branch root is the larger one
        let xmax = pow(1.0 / (a * b), 1.0 / (a - 1.0));
        let fmax = self.eval(xmax);
        if fmax < -4.0 * f64::EPSILON * unit_scale(xmax) {
            return Err(self.no_root());
        }
        Ok((xmax, 1.0))
    }

    fn newton_in_bracket(&self, (mut lo, mut hi): (f64, f64), guess: f64) -> f64 {
        let a = self.alpha.value();
        let b = self.b;
        let f_lo = self.eval(lo);
        if f_lo == 0.0 {
            return lo;
        }
        if self.eval(hi) == 0.0 {
            return hi;
        }
        let lo_positive = f_lo > 0.0;
        let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        for _ in 0..MAX_NEWTON_STEPS {
            let fx = self.eval(x);
            if fx == 0.0 {
                return x;
            }
            if (fx > 0.0) == lo_positive {
                lo = x;
            } else {
                hi = x;
            }
            let dfx = -1.0 + b * a * pow(x, a - 1.0);
            let mut next = x - fx / dfx;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if fabs(next - x) <= 2.0 * f64::EPSILON * unit_scale(x) || hi - lo <= f64::EPSILON * unit_scale(x) {
                x = next;
                break;
            }
            x = next;
        }
        // keep whichever nearby float has the smaller residual
        let mut best = x;
        let mut best_res = self.residual(x);
        for cand in [lo, hi] {
            let r = self.residual(cand);
            if r < best_res && cand > 0.0 {
                best = cand;
                best_res = r;
            }
        }
        best
    }
}

/// Root of `1 - x + b x^alpha = 0` continuous in `b` with `x(0) = 1`.
pub fn solve_trinomial(alpha: ScaleFactor, b: f64) -> Result<f64> {
    Ok(TrinomialProblem::new(alpha, b)?.solve()?.x)
}

/// Convergence radius of the trinomial series in `b`.
pub fn series_radius(alpha: ScaleFactor) -> f64 {
    let a = alpha.value();
    if a == 1.0 {
        return 1.0;
    }
    let am1 = fabs(a - 1.0);
    exp((a - 1.0) * log(am1) - a * log(fabs(a)))
}

/// `ln |C(a, k)|` and the sign of `C(a, k)` (0 when the coefficient vanishes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    const ZERO: SignedLog = SignedLog { ln_abs: f64::NEG_INFINITY, sign: 0.0 };

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * exp(self.ln_abs)
        }
    }
}

const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Generalized binomial coefficient `C(a, k) = a (a-1) ... (a-k+1) / k!`.
///
/// Non-negative integer `a` uses exact integer recurrence while the running
/// value stays below 2^53; everything else goes through log-gamma with sign
/// tracking.
pub fn generalized_binomial(a: f64, k: u64) -> SignedLog {
    if k == 0 {
        return SignedLog { ln_abs: 0.0, sign: 1.0 };
    }
    let kf = k as f64;
    if is_integer(a) && a >= 0.0 {
        if a < kf {
            return SignedLog::ZERO;
        }
        let mut c = 1.0f64;
        let mut exact = true;
        for j in 0..k {
            let num = c * (a - j as f64);
            if num >= EXACT_LIMIT {
                exact = false;
                break;
            }
            c = num / (j as f64 + 1.0);
        }
        if exact {
            return SignedLog { ln_abs: log(c), sign: 1.0 };
        }
        let (l1, _) = ln_gamma_signed(a + 1.0);
        let (l2, _) = ln_gamma_signed(kf + 1.0);
        let (l3, _) = ln_gamma_signed(a - kf + 1.0);
        return SignedLog { ln_abs: l1 - l2 - l3, sign: 1.0 };
    }
    if is_integer(a) {
        // a = -m < 0: C(-m, k) = (-1)^k C(m + k - 1, k)
        let flipped = generalized_binomial(kf - a - 1.0, k);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        return SignedLog { ln_abs: flipped.ln_abs, sign: sign * flipped.sign };
    }
    // a non-integer: Gamma(a+1) / (Gamma(k+1) Gamma(a-k+1)), no poles
    let (l1, s1) = ln_gamma_signed(a + 1.0);
    let (l2, _) = ln_gamma_signed(kf + 1.0);
    let (l3, s3) = ln_gamma_signed(a - kf + 1.0);
    SignedLog { ln_abs: l1 - l2 - l3, sign: s1 * s3 }
}

/// Coefficient of `b^n` in the trinomial series: `C(alpha n, n - 1) / n`.
pub fn series_coefficient(alpha: ScaleFactor, n: u64) -> SignedLog {
    assert!(n >= 1, "series coefficients start at n = 1");
    let c = generalized_binomial(alpha.value() * n as f64, n - 1);
    if c.sign == 0.0 {
        return c;
    }
    SignedLog { ln_abs: c.ln_abs - log(n as f64), sign: c.sign }
}

/// `C(alpha n, n - 1) / n` in integer arithmetic, for `alpha n` a
/// non-negative integer. `None` when that fails, when the quotient is not
/// an integer, or on `u128` overflow.
pub fn series_coefficient_exact(alpha: ScaleFactor, n: u64) -> Option<u128> {
    assert!(n >= 1, "series coefficients start at n = 1");
    let an = alpha.value() * n as f64;
    if !is_integer(an) || an < 0.0 || an > u64::MAX as f64 {
        return None;
    }
    let m = an as u128;
    let k = (n - 1) as u128;
    if m < k {
        return Some(0);
    }
    // C(m, j+1) = C(m, j) (m - j) / (j + 1), exact at every step
    let mut c: u128 = 1;
    for j in 0..k {
        c = c.checked_mul(m - j)? / (j + 1);
    }
    // C(m, n-1) / n is an integer when m = alpha n with integer alpha
    if !c.is_multiple_of(n as u128) {
        return None;
    }
    Some(c / n as u128)
}

/// A truncated series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub x: f64,
    pub terms_used: usize,
}

/// Partial sum of `1 + sum_{n >= 1} C(alpha n, n-1) b^n / n`.
///
/// Stops after the first non-zero term with magnitude below `tol`, or after
/// `n_max` terms. Fails when `|b|` is outside the convergence radius or the
/// term magnitudes grow three times in a row.
pub fn trinomial_series(alpha: ScaleFactor, b: f64, n_max: usize, tol: f64) -> Result<SeriesSum> {
    if !b.is_finite() {
        return Err(Error::NonFinite { what: "b" });
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter { what: "n_max", reason: "must be at least 1" });
    }
    if b == 0.0 {
        return Ok(SeriesSum { x: 1.0, terms_used: 0 });
    }
    let divergent = |terms_used| Error::DivergentSeries { alpha: alpha.value(), b, terms_used };
    if fabs(b) >= series_radius(alpha) {
        return Err(divergent(0));
    }
    let ln_b = log(fabs(b));
    let b_sign = if b < 0.0 { -1.0 } else { 1.0 };
    let mut sum = 0.0;
    let mut last_mag = f64::INFINITY;
    let mut growth = 0;
    let mut terms_used = 0;
    for n in 1..=n_max as u64 {
        terms_used = n as usize;
        let c = series_coefficient(alpha, n);
        if c.sign == 0.0 {
            continue;
        }
        let ln_mag = c.ln_abs + n as f64 * ln_b;
        let mag = exp(ln_mag);
        let sign = c.sign * if n % 2 == 1 { b_sign } else { 1.0 };
        sum += sign * mag;
        if mag > last_mag {
            growth += 1;
            if growth >= 3 {
                return Err(divergent(terms_used));
            }
        } else {
            growth = 0;
        }
        last_mag = mag;
        if mag < tol {
            break;
        }
    }
    Ok(SeriesSum { x: 1.0 + sum, terms_used })
}
