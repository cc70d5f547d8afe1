//! The nonadditivity index, the rescaling group acting on it, and the physical
//! parameter maps that produce an index.
//!
//! The group acts linearly on the offset `q - 1`, so [`DeformParam`] stores
//! that offset. `transform(q, alpha)` then divides the offset by `alpha` with
//! a single rounding, and `1_alpha = 1` holds exactly.

use core::fmt;

use crate::error::{Error, Result};
use crate::math::fabs;

/// The nonadditivity index `q`. Any finite real is accepted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DeformParam {
    offset: f64,
}

impl DeformParam {
    /// The additive (Boltzmann-Gibbs) index `q = 1`.
    pub const ONE: DeformParam = DeformParam { offset: 0.0 };

    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFinite { what: "q" });
        }
        Ok(DeformParam { offset: q - 1.0 })
    }

    /// Builds `q = 1 + offset` without rounding the offset through `q`.
    pub fn from_offset(offset: f64) -> Result<Self> {
        if !offset.is_finite() || !(1.0 + offset).is_finite() {
            return Err(Error::NonFinite { what: "q" });
        }
        Ok(DeformParam { offset })
    }

    #[inline]
    pub fn value(self) -> f64 {
        1.0 + self.offset
    }

    /// `q - 1`.
    #[inline]
    pub fn offset(self) -> f64 {
        self.offset
    }

    /// `1 - q`, the coupling of the nonadditive term.
    #[inline]
    pub fn coupling(self) -> f64 {
        -self.offset
    }

    #[inline]
    pub fn is_additive(self) -> bool {
        self.offset == 0.0
    }

    /// Shorthand for [`transform`].
    pub fn rescale(self, alpha: ScaleFactor) -> Result<Self> {
        transform(self, alpha)
    }
}

impl fmt::Display for DeformParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value(), f)
    }
}

impl TryFrom<f64> for DeformParam {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        DeformParam::new(q)
    }
}

impl From<DeformParam> for f64 {
    fn from(q: DeformParam) -> f64 {
        q.value()
    }
}

/// The group parameter `alpha`: finite and nonzero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    pub const IDENTITY: ScaleFactor = ScaleFactor(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite { what: "alpha" });
        }
        if alpha == 0.0 {
            return Err(Error::ZeroScale);
        }
        Ok(ScaleFactor(alpha))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The group inverse `1 / alpha`.
    pub fn inverse(self) -> Result<Self> {
        ScaleFactor::new(1.0 / self.0)
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl TryFrom<f64> for ScaleFactor {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        ScaleFactor::new(alpha)
    }
}

impl From<ScaleFactor> for f64 {
    fn from(a: ScaleFactor) -> f64 {
        a.0
    }
}

/// `q_alpha = (q + alpha - 1) / alpha`, computed as `1 + (q - 1) / alpha`.
pub fn transform(q: DeformParam, alpha: ScaleFactor) -> Result<DeformParam> {
    DeformParam::from_offset(q.offset / alpha.0)
}

/// Group product: `transform(transform(q, a), b) == transform(q, compose(a, b))`.
pub fn compose(alpha: ScaleFactor, beta: ScaleFactor) -> Result<ScaleFactor> {
    let product = alpha.0 * beta.0;
    if !product.is_finite() {
        return Err(Error::Overflow { op: "compose" });
    }
    if product == 0.0 {
        return Err(Error::InvalidParameter { what: "alpha * beta", reason: "underflows to zero" });
    }
    Ok(ScaleFactor(product))
}

/// Result of a duality map. The flag marks outputs outside `[0, 2]`, the
/// range on which both the index and its dual stay non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub q: DeformParam,
    pub outside_canonical_range: bool,
}

impl Dual {
    fn new(q: DeformParam) -> Self {
        let v = q.value();
        Dual { q, outside_canonical_range: !(0.0..=2.0).contains(&v) }
    }
}

/// `2 - q`, the transform at `alpha = -1`.
pub fn additive_dual(q: DeformParam) -> Dual {
    Dual::new(DeformParam { offset: -q.offset })
}

/// `1 / q`, the transform at the index-dependent `alpha = -q`.
pub fn multiplicative_dual(q: DeformParam) -> Result<Dual> {
    let v = q.value();
    if v == 0.0 {
        return Err(Error::Pole { op: "multiplicative_dual" });
    }
    // 1/q - 1 = -(q - 1) / q
    Ok(Dual::new(DeformParam::from_offset(-q.offset / v)?))
}

/// A finite heat bath of `N >= 2` particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeatBath {
    n_particles: u64,
}

impl HeatBath {
    pub fn new(n_particles: u64) -> Result<Self> {
        if n_particles < 2 {
            return Err(Error::InvalidParameter {
                what: "n_particles",
                reason: "a heat bath needs at least 2 particles",
            });
        }
        Ok(HeatBath { n_particles })
    }

    pub fn n_particles(self) -> u64 {
        self.n_particles
    }

    /// `q(N) = N / (N - 1)`.
    pub fn q(self) -> DeformParam {
        heat_bath_q(self)
    }

    /// See [`rescale_bath`].
    pub fn rescale(self, alpha: ScaleFactor) -> Result<f64> {
        rescale_bath(self, alpha)
    }
}

/// `q(N) = N / (N - 1) > 1`.
pub fn heat_bath_q(bath: HeatBath) -> DeformParam {
    DeformParam { offset: 1.0 / (bath.n_particles - 1) as f64 }
}

/// `q(N)` for a real (possibly rescaled) particle count `N > 1`.
pub fn bath_q_from_count(n: f64) -> Result<DeformParam> {
    if !n.is_finite() {
        return Err(Error::NonFinite { what: "particle count" });
    }
    if n <= 1.0 {
        return Err(Error::InvalidParameter { what: "particle count", reason: "must exceed 1" });
    }
    DeformParam::from_offset(1.0 / (n - 1.0))
}

/// `N_alpha = alpha (N - 1) + 1`. Not rounded to an integer.
pub fn rescale_bath(bath: HeatBath, alpha: ScaleFactor) -> Result<f64> {
    if alpha.0 <= 0.0 {
        return Err(Error::InvalidParameter { what: "alpha", reason: "bath rescaling needs alpha > 0" });
    }
    let n = alpha.0 * (bath.n_particles - 1) as f64 + 1.0;
    if !n.is_finite() {
        return Err(Error::Overflow { op: "rescale_bath" });
    }
    Ok(n)
}

/// A reservoir with heat capacity `C` and relative temperature fluctuation
/// `var(beta) / <beta>^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuatingBath {
    heat_capacity: f64,
    rel_fluct: f64,
}

impl FluctuatingBath {
    pub fn new(heat_capacity: f64, rel_fluct: f64) -> Result<Self> {
        if !heat_capacity.is_finite() {
            return Err(Error::NonFinite { what: "heat capacity" });
        }
        if !rel_fluct.is_finite() {
            return Err(Error::NonFinite { what: "relative fluctuation" });
        }
        if heat_capacity == 0.0 {
            return Err(Error::InvalidParameter { what: "heat capacity", reason: "must be nonzero" });
        }
        if rel_fluct < 0.0 {
            return Err(Error::InvalidParameter { what: "relative fluctuation", reason: "must be non-negative" });
        }
        Ok(FluctuatingBath { heat_capacity, rel_fluct })
    }

    pub fn heat_capacity(self) -> f64 {
        self.heat_capacity
    }

    pub fn rel_fluct(self) -> f64 {
        self.rel_fluct
    }

    pub fn q(self) -> Result<DeformParam> {
        fluctuation_q(self)
    }
}

/// `q = 1 - 1/C + var(beta)/<beta>^2`.
pub fn fluctuation_q(bath: FluctuatingBath) -> Result<DeformParam> {
    DeformParam::from_offset(bath.rel_fluct - 1.0 / bath.heat_capacity)
}

/// Relative fluctuation after rescaling by `alpha`, in the regime where `1/C`
/// is negligible: `rel_fluct / alpha`.
pub fn rescaled_fluctuation(rel_fluct: f64, alpha: ScaleFactor) -> Result<f64> {
    if !rel_fluct.is_finite() {
        return Err(Error::NonFinite { what: "relative fluctuation" });
    }
    if rel_fluct < 0.0 {
        return Err(Error::InvalidParameter { what: "relative fluctuation", reason: "must be non-negative" });
    }
    if alpha.0 <= 0.0 {
        return Err(Error::InvalidParameter { what: "alpha", reason: "fluctuation rescaling needs alpha > 0" });
    }
    Ok(rel_fluct / alpha.0)
}

/// Absolute value of the offset, used by callers that route near-additive
/// indices to dedicated branches.
#[inline]
pub(crate) fn distance_from_one(q: DeformParam) -> f64 {
    fabs(q.offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> DeformParam {
        DeformParam::new(v).unwrap()
    }
    fn a(v: f64) -> ScaleFactor {
        ScaleFactor::new(v).unwrap()
    }

    #[test]
    fn transform_examples() {
        assert_eq!(transform(q(1.5), a(1.0)).unwrap().value(), 1.5);
        assert_eq!(transform(q(1.0), a(7.3)).unwrap().value(), 1.0);
        let t = transform(q(1.5), a(2.0)).unwrap();
        assert_eq!(t.value(), 1.25);
        assert_eq!((t.value() - 1.0) * 2.0, 0.5);
    }

    #[test]
    fn rejects_zero_and_non_finite() {
        assert_eq!(ScaleFactor::new(0.0), Err(Error::ZeroScale));
        assert!(ScaleFactor::new(f64::NAN).is_err());
        assert!(ScaleFactor::new(f64::INFINITY).is_err());
        assert!(DeformParam::new(f64::NAN).is_err());
        assert!(DeformParam::new(f64::NEG_INFINITY).is_err());
        // offset / alpha overflows
        assert!(transform(q(1e300), a(1e-10)).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose(a(2.0), a(3.0)).unwrap().value(), 6.0);
        let two_step = transform(transform(q(1.5), a(2.0)).unwrap(), a(3.0)).unwrap();
        let one_step = transform(q(1.5), compose(a(2.0), a(3.0)).unwrap()).unwrap();
        assert!((two_step.value() - 13.0 / 12.0).abs() < 1e-15);
        assert!((one_step.value() - 13.0 / 12.0).abs() < 1e-15);
        assert_eq!(compose(a(4.2), a(1.0)).unwrap().value(), 4.2);
        assert_eq!(compose(a(2.0), a(0.5)).unwrap().value(), 1.0);
        assert!(compose(a(1e200), a(1e200)).is_err());
    }

    #[test]
    fn dualities() {
        let d = additive_dual(q(1.5));
        assert_eq!(d.q.value(), 0.5);
        assert!(!d.outside_canonical_range);
        assert_eq!(additive_dual(q(1.0)).q.value(), 1.0);
        let d = additive_dual(q(2.5));
        assert_eq!(d.q.value(), -0.5);
        assert!(d.outside_canonical_range);

        assert_eq!(multiplicative_dual(q(2.0)).unwrap().q.value(), 0.5);
        assert_eq!(multiplicative_dual(q(1.0)).unwrap().q.value(), 1.0);
        assert!(matches!(multiplicative_dual(q(0.0)), Err(Error::Pole { .. })));
        assert!(multiplicative_dual(q(0.25)).unwrap().outside_canonical_range);
    }

    #[test]
    fn heat_bath_examples() {
        assert_eq!(HeatBath::new(2).unwrap().q().value(), 2.0);
        assert!((HeatBath::new(101).unwrap().q().value() - 1.01).abs() < 1e-15);
        assert!((HeatBath::new(1_000_000_000).unwrap().q().value() - 1.0).abs() < 1e-8);
        assert!(HeatBath::new(1).is_err());
        assert!(HeatBath::new(0).is_err());

        assert_eq!(rescale_bath(HeatBath::new(3).unwrap(), a(2.0)).unwrap(), 5.0);
        assert_eq!(rescale_bath(HeatBath::new(3).unwrap(), a(1.0)).unwrap(), 3.0);
        let b5 = HeatBath::new(5).unwrap();
        let n = rescale_bath(b5, a(0.5)).unwrap();
        assert_eq!(n, 3.0);
        let direct = bath_q_from_count(n).unwrap().value();
        let via_group = transform(b5.q(), a(0.5)).unwrap().value();
        assert!((direct - via_group).abs() <= 1e-15);
        assert!(rescale_bath(b5, a(-1.0)).is_err());
    }

    #[test]
    fn fluctuation_examples() {
        let b = FluctuatingBath::new(10.0, 0.2).unwrap();
        assert!((b.q().unwrap().value() - 1.1).abs() < 1e-15);
        assert_eq!(FluctuatingBath::new(1.0, 1.0).unwrap().q().unwrap().value(), 1.0);
        let bg = FluctuatingBath::new(1e12, 0.0).unwrap().q().unwrap();
        assert!((bg.value() - 1.0).abs() < 1e-11);
        assert!(FluctuatingBath::new(0.0, 0.1).is_err());
        assert!(FluctuatingBath::new(1.0, -0.1).is_err());

        assert_eq!(rescaled_fluctuation(0.4, a(2.0)).unwrap(), 0.2);
        assert_eq!(rescaled_fluctuation(0.4, a(1.0)).unwrap(), 0.4);
        assert_eq!(rescaled_fluctuation(0.0, a(5.0)).unwrap(), 0.0);
        assert!(rescaled_fluctuation(0.4, a(-2.0)).is_err());
    }

    #[test]
    fn rescaled_fluctuation_matches_group_when_capacity_negligible() {
        let rel = 0.37;
        let qv = DeformParam::from_offset(rel).unwrap();
        let alpha = a(3.5);
        let lhs = transform(qv, alpha).unwrap().offset();
        assert_eq!(lhs, rescaled_fluctuation(rel, alpha).unwrap());
    }
}
