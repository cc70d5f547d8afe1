//! Probability vectors and the entropy functionals built on them.
//!
//! Zero probabilities follow the continuity conventions `0^q = 0` for
//! `q > 0` and `0 ln 0 = 0`. For `q <= 0` a zero entry makes the power sums
//! undefined and the functionals return a domain error.
//!
//! The Tsallis and Renyi entropies are evaluated through the partition
//! excess `Z_q - 1 = sum_i p_i expm1((q-1) ln p_i)`, which keeps full
//! precision as `q` approaches 1 and needs no switch to a limiting branch
//! except at `q = 1` itself.

use alloc::vec::Vec;

use crate::deformation::{transform, DeformParam, ScaleFactor};
use crate::error::{Error, Result};
use crate::math::{exp, expm1, expm1_ratio, fabs, log, log1p, pow};

/// Sum tolerance accepted as-is at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
/// Sum tolerance accepted after renormalization (flagged).
pub const RENORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A finite discrete probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
    renormalized: bool,
}

impl Distribution {
    /// Validates `probs`: non-empty, entries finite and non-negative, sum
    /// within [`NORMALIZATION_TOLERANCE`] of 1. Sums off by at most
    /// [`RENORMALIZATION_TOLERANCE`] are rescaled and flagged.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution { reason: "empty", index: None });
        }
        for (i, &p) in probs.iter().enumerate() {
            if p.is_nan() {
                return Err(Error::InvalidDistribution { reason: "NaN entry", index: Some(i) });
            }
            if !p.is_finite() {
                return Err(Error::InvalidDistribution { reason: "infinite entry", index: Some(i) });
            }
            if p < 0.0 {
                return Err(Error::InvalidDistribution { reason: "negative entry", index: Some(i) });
            }
        }
        let total: f64 = probs.iter().sum();
        let dev = fabs(total - 1.0);
        if dev <= NORMALIZATION_TOLERANCE {
            Ok(Distribution { probs, renormalized: false })
        } else if dev <= RENORMALIZATION_TOLERANCE {
            let probs = probs.into_iter().map(|p| p / total).collect();
            Ok(Distribution { probs, renormalized: true })
        } else {
            Err(Error::InvalidDistribution { reason: "entries do not sum to 1", index: None })
        }
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution { reason: "empty", index: None });
        }
        Ok(Distribution { probs: alloc::vec![1.0 / n as f64; n], renormalized: false })
    }

    /// Certainty on state `k` of `n`.
    pub fn delta(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidDistribution { reason: "delta index out of range", index: Some(k) });
        }
        let mut probs = alloc::vec![0.0; n];
        probs[k] = 1.0;
        Ok(Distribution { probs, renormalized: false })
    }

    /// Normalizes non-negative finite weights with a positive sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution { reason: "weights must be finite and non-negative", index: None });
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDistribution { reason: "weights have no positive mass", index: None });
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Ok(Distribution { probs, renormalized: false })
    }

    /// Normalizes `exp(log_weights)` without overflow.
    pub(crate) fn from_log_weights(log_weights: &[f64]) -> Result<Self> {
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidDistribution { reason: "log-weights are not finite", index: None });
        }
        Distribution::from_weights(log_weights.iter().map(|l| exp(l - max)).collect())
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false; a distribution has at least one state.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// True when construction rescaled the input to unit sum.
    pub fn renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// `p_{ij} = p_i r_j`, row-major in `self`.
    pub fn product(&self, other: &Distribution) -> Distribution {
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &p in &self.probs {
            probs.extend(other.probs.iter().map(|&r| p * r));
        }
        Distribution { probs, renormalized: false }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    fn has_zero(&self) -> bool {
        self.probs.contains(&0.0)
    }

    fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.probs.iter().copied().filter(|&p| p > 0.0)
    }
}

fn zero_power_guard(p: &Distribution, exponent: f64, op: &'static str) -> Result<()> {
    if exponent <= 0.0 && p.has_zero() {
        return Err(Error::Domain { op, reason: "zero probability raised to a non-positive power" });
    }
    Ok(())
}

/// `Z_q = sum_k p_k^q`, tagged with the index used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSum {
    pub z: f64,
    pub q_used: DeformParam,
}

pub fn partition_sum(p: &Distribution, q: DeformParam) -> Result<PartitionSum> {
    let qv = q.value();
    zero_power_guard(p, qv, "partition_sum")?;
    let z: f64 = p.support().map(|x| pow(x, qv)).sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Overflow { op: "partition_sum" });
    }
    Ok(PartitionSum { z, q_used: q })
}

/// `Z_q - 1`, accurate near `q = 1`.
fn partition_excess(p: &Distribution, q: DeformParam) -> f64 {
    let d = q.offset();
    p.support().map(|x| x * expm1(d * log(x))).sum()
}

/// `ln sum_i p_i^q`, with the largest term factored out.
fn log_partition(p: &Distribution, q: DeformParam) -> f64 {
    let qv = q.value();
    let top = p.support().map(|x| qv * log(x)).fold(f64::NEG_INFINITY, f64::max);
    top + log(p.support().map(|x| exp(qv * log(x) - top)).sum::<f64>())
}

/// `-sum_i p_i ln p_i`.
pub fn shannon(p: &Distribution) -> f64 {
    -p.support().map(|x| x * log(x)).sum::<f64>()
}

/// `S_q = (sum_i p_i^q - 1) / (1 - q)`; Shannon at `q = 1`.
pub fn tsallis(p: &Distribution, q: DeformParam) -> Result<f64> {
    if q.is_additive() {
        return Ok(shannon(p));
    }
    zero_power_guard(p, q.value(), "tsallis")?;
    let s = partition_excess(p, q) / q.coupling();
    if !s.is_finite() {
        return Err(Error::Overflow { op: "tsallis" });
    }
    Ok(s)
}

/// `R_q = ln Z_q / (1 - q)`; Shannon at `q = 1`.
pub fn renyi(p: &Distribution, q: DeformParam) -> Result<f64> {
    if q.is_additive() {
        return Ok(shannon(p));
    }
    zero_power_guard(p, q.value(), "renyi")?;
    let excess = partition_excess(p, q);
    // log1p loses digits once Z_q is far from 1; use log-sum-exp there
    let ln_z = if fabs(excess) < 0.5 { log1p(excess) } else { log_partition(p, q) };
    let r = ln_z / q.coupling();
    if !r.is_finite() {
        return Err(Error::Overflow { op: "renyi" });
    }
    Ok(r)
}

/// Escort distribution `rho_k(r) = p_k^r / sum_j p_j^r`.
pub fn escort(p: &Distribution, r: f64) -> Result<Distribution> {
    if !r.is_finite() {
        return Err(Error::NonFinite { what: "escort order r" });
    }
    if r == 1.0 {
        return Ok(p.clone());
    }
    zero_power_guard(p, r, "escort")?;
    let logs: Vec<f64> = p.probs.iter().map(|&x| if x > 0.0 { r * log(x) } else { f64::NEG_INFINITY }).collect();
    Distribution::from_log_weights(&logs)
}

/// `<E>_r = sum_k rho_k(r) E_k`.
pub fn escort_mean(p: &Distribution, levels: &[f64], r: f64) -> Result<f64> {
    if levels.len() != p.len() {
        return Err(Error::LengthMismatch { expected: p.len(), found: levels.len() });
    }
    let rho = escort(p, r)?;
    Ok(rho.probs.iter().zip(levels).map(|(w, e)| w * e).sum())
}

/// Smallest index for which the hybrid entropy is defined.
pub const HYBRID_MIN_Q: f64 = 0.5;

/// Hybrid entropy `D_q = ln_q exp(-sum_i rho_i(q) ln p_i)`, defined for
/// `q >= 1/2`. Zero-probability states carry no escort weight and are
/// left out of the average.
pub fn hybrid(p: &Distribution, q: DeformParam) -> Result<f64> {
    if q.value() < HYBRID_MIN_Q {
        return Err(Error::Domain { op: "hybrid", reason: "hybrid entropy needs q >= 1/2 (maximality fails below)" });
    }
    let rho = escort(p, q.value())?;
    let info: f64 = rho.probs.iter().zip(&p.probs).filter(|(_, &x)| x > 0.0).map(|(w, &x)| -w * log(x)).sum();
    // ln_q(e^H) = H expm1((1-q) H) / ((1-q) H)
    let d = info * expm1_ratio(q.coupling() * info);
    if !d.is_finite() {
        return Err(Error::Overflow { op: "hybrid" });
    }
    Ok(d)
}

/// Average hybrid entropy `A_q = D_{(q+1)/2}`, i.e. the hybrid entropy at the
/// `alpha = 2` image of `q`. Defined for `q >= 0`.
pub fn avg_hybrid(p: &Distribution, q: DeformParam) -> Result<f64> {
    if q.value() < 0.0 {
        return Err(Error::Domain { op: "avg_hybrid", reason: "average hybrid entropy needs q >= 0" });
    }
    let half = transform(q, ScaleFactor::new(2.0)?)?;
    hybrid(p, half)
}

/// First and second moments of the Hartley information `I = -ln p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartleyMoments {
    pub mean_info: f64,
    pub second_moment: f64,
}

pub fn hartley_moments(p: &Distribution) -> HartleyMoments {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for x in p.support() {
        let l = log(x);
        m1 -= x * l;
        m2 += x * l * l;
    }
    HartleyMoments { mean_info: m1, second_moment: m2 }
}

/// `alpha = 1 + <I>^2 / <I^2>`, the rescaling that makes Tsallis entropy
/// additive to second order around `q = 1`. Lies in `[1, 2]`; equal to 2 on
/// distributions uniform over their support and to 1 for certainty (the 0/0
/// limit).
pub fn quasi_additivity_alpha(p: &Distribution) -> ScaleFactor {
    let m = hartley_moments(p);
    if m.second_moment == 0.0 {
        return ScaleFactor::IDENTITY;
    }
    // Jensen gives <I>^2 <= <I^2>; clamp the last-ulp overshoot.
    let ratio = (m.mean_info * m.mean_info / m.second_moment).min(1.0);
    ScaleFactor::new(1.0 + ratio).expect("alpha in [1, 2]")
}

/// The two sides of `2 S_q(P) ~ S_{q_alpha}(P x P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiAdditivity {
    pub alpha: ScaleFactor,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn quasi_additivity_check(p: &Distribution, q: DeformParam) -> Result<QuasiAdditivity> {
    let alpha = quasi_additivity_alpha(p);
    let lhs = 2.0 * tsallis(p, q)?;
    let rhs = tsallis(&p.product(p), transform(q, alpha)?)?;
    Ok(QuasiAdditivity { alpha, lhs, rhs, gap: fabs(lhs - rhs) })
}
