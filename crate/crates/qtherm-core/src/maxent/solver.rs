//! Self-consistent MaxEnt solvers.
//!
//! Extremizing `S_{q_alpha}(P) - Phi sum_k p_k - Omega <E>_q` gives, level by
//! level,
//!
//! ```text
//! c p_i^((q-1)/alpha) - Phi - q Omega dE_i p_i^(q-1) / Z_q = 0,
//! c = q_alpha / (1 - q_alpha),  Phi = c Z_{q_alpha},  dE_i = E_i - <E>_q.
//! ```
//!
//! With `x = p_i^((q-1)/alpha) / Z_{q_alpha}` this is the trinomial
//! `1 - x + b x^alpha = 0`, `b = q(1-q)/(q+alpha-1) Z_{q_alpha}^(alpha-1)
//! / Z_q Omega dE_i`, and `p_i = (x Z_{q_alpha})^(alpha/(q-1))`. Since
//! `Z_q`, `Z_{q_alpha}` and `<E>_q` depend on `P`, the solver iterates from
//! the uniform distribution with damped updates until the sup-norm change
//! drops below tolerance, then certifies the result by evaluating the
//! stationarity equation at every level.
//!
//! For the Renyi functional `R_{q_alpha}` the gradient carries an extra
//! `1 / Z_{q_alpha}`, so `Phi = c` and `b` gains a factor `Z_{q_alpha}`.
//!
//! As `alpha -> inf` the functional becomes Shannon entropy and the
//! stationarity condition turns into
//! `-ln p_i - S_1 - q Omega dE_i p_i^(q-1) / Z_q = 0`, solved level-wise by
//! `p_i = exp(-S_1 - W(A_i) / (q-1))` with
//! `A_i = (q-1) q Omega dE_i e^(-(q-1) S_1) / Z_q`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::lambert::lambert_w;
use super::trinomial::solve_trinomial;
use super::EnergySpectrum;
use crate::deformation::{distance_from_one, transform, DeformParam, ScaleFactor};
use crate::entropy::{escort_mean, partition_sum, shannon, Distribution, PartitionSum};
use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, pow, sqrt, unit_scale};

/// Indices with `|q - 1|` at or below this are solved as Boltzmann-Gibbs.
pub const ADDITIVE_THRESHOLD: f64 = 1e-9;
/// Default search bracket for the multiplier in target-mean mode.
pub const DEFAULT_OMEGA_BRACKET: (f64, f64) = (-1e3, 1e3);

/// How the energy constraint is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Fixed Lagrange multiplier `Omega`.
    Omega(f64),
    /// Search `Omega` in `bracket` until the escort mean equals `target`.
    TargetMean { target: f64, bracket: (f64, f64) },
}

impl Constraint {
    pub fn target_mean(target: f64) -> Self {
        Constraint::TargetMean { target, bracket: DEFAULT_OMEGA_BRACKET }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Constraint::Omega(w) if !w.is_finite() => Err(Error::NonFinite { what: "omega" }),
            Constraint::TargetMean { target, bracket } => {
                if !target.is_finite() {
                    return Err(Error::NonFinite { what: "target mean" });
                }
                if !bracket.0.is_finite() || !bracket.1.is_finite() || bracket.0 >= bracket.1 {
                    return Err(Error::InvalidParameter { what: "omega bracket", reason: "needs finite lo < hi" });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntProblem {
    pub spectrum: EnergySpectrum,
    pub q: DeformParam,
    pub alpha: ScaleFactor,
    pub constraint: Constraint,
}

impl MaxEntProblem {
    pub fn new(spectrum: EnergySpectrum, q: DeformParam, alpha: ScaleFactor, constraint: Constraint) -> Result<Self> {
        if alpha.value() <= 0.0 {
            return Err(Error::InvalidParameter { what: "alpha", reason: "MaxEnt needs alpha > 0" });
        }
        constraint.validate()?;
        Ok(MaxEntProblem { spectrum, q, alpha, constraint })
    }
}

/// Fixed-point iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Weight of the new iterate in each damped update.
    pub damping: f64,
    /// Sup-norm change in `P` that ends the iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { damping: 0.5, tolerance: 1e-12, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSolution {
    pub probs: Distribution,
    pub z_q: PartitionSum,
    pub z_q_alpha: PartitionSum,
    /// Normalization multiplier `Phi`.
    pub phi: f64,
    /// Energy multiplier `Omega` the solution belongs to.
    pub omega: f64,
    /// `<E>_q`.
    pub escort_mean: f64,
    /// Max over levels of `|stationarity equation|`, evaluated at `probs`.
    pub stationarity_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `b = q(1-q)/(q+alpha-1) * Z_{q_alpha}^(alpha-1) / Z_q * Omega * dE`.
pub fn trinomial_b(
    q: DeformParam,
    alpha: ScaleFactor,
    omega: f64,
    delta_e: f64,
    z_q: f64,
    z_q_alpha: f64,
) -> Result<f64> {
    if !(z_q > 0.0) || !(z_q_alpha > 0.0) {
        return Err(Error::InvalidParameter { what: "partition sum", reason: "must be positive" });
    }
    let a = alpha.value();
    // q + alpha - 1 = (q - 1) + alpha
    let shifted = q.offset() + a;
    if shifted == 0.0 {
        return Err(Error::Pole { op: "trinomial_b" });
    }
    let b = q.value() * q.coupling() / shifted * pow(z_q_alpha, a - 1.0) / z_q * omega * delta_e;
    if !b.is_finite() {
        return Err(Error::Overflow { op: "trinomial_b" });
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Functional {
    Tsallis,
    Renyi,
}

/// Maximizes `S_{q_alpha}` under normalization and the `q`-escort energy
/// constraint, with default [`SolverOptions`].
pub fn solve_maxent(problem: &MaxEntProblem) -> Result<MaxEntSolution> {
    solve_maxent_with(problem, &SolverOptions::default())
}

pub fn solve_maxent_with(problem: &MaxEntProblem, opts: &SolverOptions) -> Result<MaxEntSolution> {
    solve_deformed(problem, Functional::Tsallis, opts)
}

/// As [`solve_maxent`] for the Renyi entropy `R_{q_alpha}`.
pub fn solve_maxent_renyi(problem: &MaxEntProblem) -> Result<MaxEntSolution> {
    solve_maxent_renyi_with(problem, &SolverOptions::default())
}

pub fn solve_maxent_renyi_with(problem: &MaxEntProblem, opts: &SolverOptions) -> Result<MaxEntSolution> {
    solve_deformed(problem, Functional::Renyi, opts)
}

fn solve_deformed(problem: &MaxEntProblem, functional: Functional, opts: &SolverOptions) -> Result<MaxEntSolution> {
    check_options(opts)?;
    let spectrum = &problem.spectrum;
    let q = problem.q;
    if distance_from_one(q) <= ADDITIVE_THRESHOLD {
        return with_constraint(spectrum, &problem.constraint, |omega| solve_gibbs(spectrum, q, omega));
    }
    let alpha = problem.alpha;
    with_constraint(spectrum, &problem.constraint, |omega| fixed_point(spectrum, q, alpha, omega, functional, opts))
}

/// Maximizes Shannon entropy (the `alpha -> inf` limit) under the
/// `q`-escort energy constraint, with default [`SolverOptions`].
pub fn solve_maxent_shannon_limit(
    spectrum: &EnergySpectrum,
    q: DeformParam,
    constraint: &Constraint,
) -> Result<MaxEntSolution> {
    solve_maxent_shannon_limit_with(spectrum, q, constraint, &SolverOptions::default())
}

pub fn solve_maxent_shannon_limit_with(
    spectrum: &EnergySpectrum,
    q: DeformParam,
    constraint: &Constraint,
    opts: &SolverOptions,
) -> Result<MaxEntSolution> {
    check_options(opts)?;
    constraint.validate()?;
    if distance_from_one(q) <= ADDITIVE_THRESHOLD {
        return with_constraint(spectrum, constraint, |omega| solve_gibbs(spectrum, q, omega));
    }
    with_constraint(spectrum, constraint, |omega| lambert_fixed_point(spectrum, q, omega, opts))
}

/// Boltzmann-Gibbs solution `p_i ~ exp(-Omega E_i)`, the common `q -> 1`
/// limit of every solver here. Diagnostics use the Shannon functional:
/// `Phi = S_1 - 1`, residual of `-ln p_i - S_1 - Omega (E_i - <E>)`.
pub fn solve_gibbs(spectrum: &EnergySpectrum, q: DeformParam, omega: f64) -> Result<MaxEntSolution> {
    if !omega.is_finite() {
        return Err(Error::NonFinite { what: "omega" });
    }
    let levels = spectrum.levels();
    let logs: Vec<f64> = levels.iter().map(|e| -omega * e).collect();
    let probs = Distribution::from_log_weights(&logs)?;
    let s1 = shannon(&probs);
    let linear_mean: f64 = probs.probs().iter().zip(levels).map(|(p, e)| p * e).sum();
    let residual = probs
        .probs()
        .iter()
        .zip(levels)
        .map(|(&p, e)| fabs(-log(p) - s1 - omega * (e - linear_mean)))
        .fold(0.0, f64::max);
    Ok(MaxEntSolution {
        z_q: partition_sum(&probs, q)?,
        z_q_alpha: PartitionSum { z: 1.0, q_used: DeformParam::ONE },
        phi: s1 - 1.0,
        omega,
        escort_mean: escort_mean(&probs, levels, q.value())?,
        stationarity_residual: residual,
        iterations: 1,
        converged: true,
        probs,
    })
}

fn check_options(opts: &SolverOptions) -> Result<()> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter { what: "damping", reason: "must lie in (0, 1]" });
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidParameter { what: "tolerance", reason: "must be positive" });
    }
    if opts.max_iterations == 0 {
        return Err(Error::InvalidParameter { what: "max_iterations", reason: "must be at least 1" });
    }
    Ok(())
}

/// Damped update `p <- d p_new + (1 - d) p`; returns the sup-norm change.
fn damped_update(p: &mut [f64], fresh: &Distribution, damping: f64) -> f64 {
    let mut change: f64 = 0.0;
    let mut total = 0.0;
    for (old, &new) in p.iter_mut().zip(fresh.probs()) {
        let next = damping * new + (1.0 - damping) * *old;
        change = change.max(fabs(next - *old));
        *old = next;
        total += next;
    }
    for x in p.iter_mut() {
        *x /= total;
    }
    change
}

fn fixed_point(
    spectrum: &EnergySpectrum,
    q: DeformParam,
    alpha: ScaleFactor,
    omega: f64,
    functional: Functional,
    opts: &SolverOptions,
) -> Result<MaxEntSolution> {
    let levels = spectrum.levels();
    let n = levels.len();
    let qa = transform(q, alpha)?;
    let a = alpha.value();
    let exponent = a / q.offset();
    let mut p = alloc::vec![1.0 / n as f64; n];
    let mut logs = alloc::vec![0.0; n];
    let mut iterations = 0;
    let mut converged = spectrum.is_degenerate() || omega == 0.0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let current = Distribution::from_weights(p.clone())?;
        let z_q = partition_sum(&current, q)?.z;
        let z_qa = partition_sum(&current, qa)?.z;
        let mean = escort_mean(&current, levels, q.value())?;
        for (i, (&e, slot)) in levels.iter().zip(logs.iter_mut()).enumerate() {
            let mut b = trinomial_b(q, alpha, omega, e - mean, z_q, z_qa)?;
            if functional == Functional::Renyi {
                b *= z_qa;
            }
            let x = solve_trinomial(alpha, b).map_err(|err| err.at_level(i))?;
            *slot = exponent * log(x * z_qa);
        }
        let fresh = Distribution::from_log_weights(&logs)?;
        let change = damped_update(&mut p, &fresh, opts.damping);
        converged = change < opts.tolerance;
    }

    let probs = Distribution::from_weights(p)?;
    let z_q = partition_sum(&probs, q)?;
    let z_qa = partition_sum(&probs, qa)?;
    let mean = escort_mean(&probs, levels, q.value())?;
    let c = qa.value() / qa.coupling();
    let phi = match functional {
        Functional::Tsallis => c * z_qa.z,
        Functional::Renyi => c,
    };
    let entropy_scale = match functional {
        Functional::Tsallis => c,
        Functional::Renyi => c / z_qa.z,
    };
    let qv = q.value();
    let residual = probs
        .probs()
        .iter()
        .zip(levels)
        .map(|(&pi, &e)| {
            let lp = log(pi);
            let r =
                entropy_scale * exp(q.offset() / a * lp) - phi - qv * omega * (e - mean) * exp(q.offset() * lp) / z_q.z;
            fabs(r)
        })
        .fold(0.0, |acc: f64, r| if r.is_nan() { f64::NAN } else { acc.max(r) });

    let solution = MaxEntSolution {
        probs,
        z_q,
        z_q_alpha: z_qa,
        phi,
        omega,
        escort_mean: mean,
        stationarity_residual: residual,
        iterations,
        converged,
    };
    if converged {
        Ok(solution)
    } else {
        Err(Error::NonConvergence { partial: Box::new(solution) })
    }
}

fn lambert_fixed_point(
    spectrum: &EnergySpectrum,
    q: DeformParam,
    omega: f64,
    opts: &SolverOptions,
) -> Result<MaxEntSolution> {
    let levels = spectrum.levels();
    let n = levels.len();
    let qv = q.value();
    let d = q.offset();
    let mut p = alloc::vec![1.0 / n as f64; n];
    let mut logs = alloc::vec![0.0; n];
    let mut iterations = 0;
    let mut converged = spectrum.is_degenerate() || omega == 0.0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let current = Distribution::from_weights(p.clone())?;
        let s1 = shannon(&current);
        let z_q = partition_sum(&current, q)?.z;
        let mean = escort_mean(&current, levels, qv)?;
        let tilt = exp(-d * s1);
        for (i, (&e, slot)) in levels.iter().zip(logs.iter_mut()).enumerate() {
            let arg = d * qv * omega * (e - mean) * tilt / z_q;
            let w = lambert_w(arg).map_err(|err| err.at_level(i))?;
            *slot = -s1 - w / d;
        }
        let fresh = Distribution::from_log_weights(&logs)?;
        let change = damped_update(&mut p, &fresh, opts.damping);
        converged = change < opts.tolerance;
    }

    let probs = Distribution::from_weights(p)?;
    let s1 = shannon(&probs);
    let z_q = partition_sum(&probs, q)?;
    let mean = escort_mean(&probs, levels, qv)?;
    let residual = probs
        .probs()
        .iter()
        .zip(levels)
        .map(|(&pi, &e)| {
            let lp = log(pi);
            fabs(-lp - s1 - qv * omega * (e - mean) * exp(d * lp) / z_q.z)
        })
        .fold(0.0, |acc: f64, r| if r.is_nan() { f64::NAN } else { acc.max(r) });
    let solution = MaxEntSolution {
        probs,
        z_q,
        z_q_alpha: PartitionSum { z: 1.0, q_used: DeformParam::ONE },
        phi: s1 - 1.0,
        omega,
        escort_mean: mean,
        stationarity_residual: residual,
        iterations,
        converged,
    };
    if converged {
        Ok(solution)
    } else {
        Err(Error::NonConvergence { partial: Box::new(solution) })
    }
}

fn with_constraint(
    spectrum: &EnergySpectrum,
    constraint: &Constraint,
    mut solve: impl FnMut(f64) -> Result<MaxEntSolution>,
) -> Result<MaxEntSolution> {
    match *constraint {
        Constraint::Omega(omega) => solve(omega),
        Constraint::TargetMean { target, bracket } => fit_target(spectrum, target, bracket, solve),
    }
}

const BISECTION_STEPS: usize = 200;
const FRONTIER_STEPS: usize = 60;

/// Finds `Omega` in `bracket` whose solution has escort mean `target`.
///
/// Starts at `Omega = 0` (uniform, mean = arithmetic mean), expands
/// geometrically in the direction that moves the mean toward the target
/// and falls back to the other direction. Where the inner solver fails
/// (no real root, non-convergence) the search backs off toward the last
/// solvable multiplier. A sign change is then refined by bisection.
fn fit_target(
    spectrum: &EnergySpectrum,
    target: f64,
    (lo, hi): (f64, f64),
    mut solve: impl FnMut(f64) -> Result<MaxEntSolution>,
) -> Result<MaxEntSolution> {
    let (e_min, e_max) = (spectrum.min(), spectrum.max());
    if target < e_min || target > e_max {
        return Err(Error::TargetOutOfRange { target, min: e_min, max: e_max });
    }
    let tol = 1e-12 * unit_scale(e_max - e_min).max(unit_scale(target));
    let unreachable = Error::TargetUnreachable { target, lo, hi };
    if spectrum.is_degenerate() {
        return solve(0.0);
    }
    let start_omega = 0.0f64.clamp(lo, hi);
    let start = solve(start_omega)?;
    let g0 = start.escort_mean - target;
    if fabs(g0) <= tol {
        return Ok(start);
    }
    let opposite = |g: f64| g == 0.0 || (g > 0.0) != (g0 > 0.0);

    // positive Omega lowers the escort mean for the usual parameter range
    let first = if g0 > 0.0 { 1.0 } else { -1.0 };
    for dir in [first, -first] {
        let bound = if dir > 0.0 { hi } else { lo };
        if (bound - start_omega) * dir <= 0.0 {
            continue;
        }
        let mut feasible = start_omega;
        let mut step = 1.0f64.min(fabs(bound - start_omega));
        loop {
            let cand = if dir > 0.0 { (start_omega + step).min(bound) } else { (start_omega - step).max(bound) };
            match solve(cand) {
                Ok(sol) => {
                    let g = sol.escort_mean - target;
                    if fabs(g) <= tol {
                        return Ok(sol);
                    }
                    if opposite(g) {
                        return bisect_omega(feasible, cand, g0, target, tol, &mut solve).map(|s| s.unwrap_or(sol));
                    }
                    feasible = cand;
                    if cand == bound {
                        break;
                    }
                    step *= 2.0;
                }
                Err(e) if e.is_solver_failure() => {
                    // walk toward the feasibility frontier between feasible and cand
                    let mut infeasible = cand;
                    let mut found = None;
                    for _ in 0..FRONTIER_STEPS {
                        let mid = 0.5 * (feasible + infeasible);
                        match solve(mid) {
                            Ok(sol) => {
                                let g = sol.escort_mean - target;
                                if fabs(g) <= tol {
                                    return Ok(sol);
                                }
                                if opposite(g) {
                                    found = Some((mid, sol));
                                    break;
                                }
                                feasible = mid;
                            }
                            Err(e) if e.is_solver_failure() => infeasible = mid,
                            Err(e) => return Err(e),
                        }
                    }
                    if let Some((mid, sol)) = found {
                        return bisect_omega(feasible, mid, g0, target, tol, &mut solve).map(|s| s.unwrap_or(sol));
                    }
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Err(unreachable)
}

/// Bisection between `same` (mean on the side of `g0`) and `other`.
fn bisect_omega(
    mut same: f64,
    mut other: f64,
    g0: f64,
    target: f64,
    tol: f64,
    solve: &mut impl FnMut(f64) -> Result<MaxEntSolution>,
) -> Result<Option<MaxEntSolution>> {
    let mut best: Option<(f64, MaxEntSolution)> = None;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (same + other);
        if mid == same || mid == other {
            break;
        }
        let sol = solve(mid)?;
        let g = sol.escort_mean - target;
        let ag = fabs(g);
        let better = best.as_ref().is_none_or(|(b, _)| ag < *b);
        let done = ag <= tol;
        if (g > 0.0) == (g0 > 0.0) && g != 0.0 {
            same = mid;
        } else {
            other = mid;
        }
        if better {
            best = Some((ag, sol));
        }
        if done {
            break;
        }
    }
    Ok(best.map(|(_, s)| s))
}

/// Both sides of `Z_{(q+1)/2} <= sqrt(Z_q Z_1) = sqrt(Z_q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl PartitionBound {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn partition_bound_check(p: &Distribution, q: DeformParam) -> Result<PartitionBound> {
    if q.value() < 0.0 {
        return Err(Error::Domain { op: "partition_bound_check", reason: "needs q >= 0" });
    }
    let half = transform(q, ScaleFactor::new(2.0)?)?;
    let lhs = partition_sum(p, half)?.z;
    let rhs = sqrt(partition_sum(p, q)?.z);
    Ok(PartitionBound { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(v: f64) -> DeformParam {
        DeformParam::new(v).unwrap()
    }
    fn a(v: f64) -> ScaleFactor {
        ScaleFactor::new(v).unwrap()
    }
    fn spectrum(levels: &[f64]) -> EnergySpectrum {
        EnergySpectrum::new(levels.to_vec()).unwrap()
    }
    fn problem(levels: &[f64], qv: f64, al: f64, omega: f64) -> MaxEntProblem {
        MaxEntProblem::new(spectrum(levels), q(qv), a(al), Constraint::Omega(omega)).unwrap()
    }

    #[test]
    fn trinomial_b_examples() {
        for (qv, al) in [(1.2, 2.0), (0.7, 0.5), (3.0, 1.0)] {
            assert_eq!(trinomial_b(q(qv), a(al), 0.5, 0.0, 0.9, 0.95).unwrap(), 0.0);
        }
        for qv in [1.0 - 1e-9, 1.0 + 1e-9] {
            assert!(trinomial_b(q(qv), a(2.0), 0.5, 1.0, 0.9, 0.95).unwrap().abs() < 1e-8);
        }
        let b = trinomial_b(q(1.2), a(2.0), 0.5, 1.0, 0.9, 0.95).unwrap();
        let direct = (1.2 * -0.2 / 2.2) * (0.95 / 0.9) * 0.5;
        assert!((b - direct).abs() < 1e-16);
        assert!((b + 0.057575).abs() < 1e-6);
        // q + alpha - 1 = 0
        assert!(matches!(trinomial_b(q(0.5), a(0.5), 1.0, 1.0, 1.0, 1.0), Err(Error::Pole { .. })));
        assert!(trinomial_b(q(1.2), a(2.0), 1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_omega_is_uniform() {
        for (qv, al) in [(0.8, 0.5), (1.2, 2.0), (1.5, 3.0)] {
            let s = solve_maxent(&problem(&[0.0, 1.0, 2.0, 5.0], qv, al, 0.0)).unwrap();
            for &p in s.probs.probs() {
                assert!((p - 0.25).abs() < 1e-15);
            }
            assert!(s.stationarity_residual < 1e-13);
        }
        let s = solve_maxent_shannon_limit(&spectrum(&[0.0, 3.0]), q(1.3), &Constraint::Omega(0.0)).unwrap();
        assert_eq!(s.probs.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn degenerate_spectrum_is_uniform() {
        for (qv, al, w) in [(0.8, 2.0, 3.0), (1.2, 0.5, -1.0), (1.0, 1.0, 5.0)] {
            let s = solve_maxent(&problem(&[2.0, 2.0, 2.0], qv, al, w)).unwrap();
            for &p in s.probs.probs() {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn alpha_one_is_q_exponential() {
        let s = solve_maxent(&problem(&[0.0, 1.0, 2.0], 1.2, 1.0, 0.5)).unwrap();
        assert!(s.converged);
        let y: Vec<f64> = s.probs.probs().iter().map(|p| p.powf(1.0 - 1.2)).collect();
        // collinear in (E, p^(1-q)) for equally spaced levels
        assert!((y[0] - 2.0 * y[1] + y[2]).abs() < 1e-8);
        assert!(s.stationarity_residual < 1e-8);
    }

    #[test]
    fn residual_across_parameters() {
        for levels in [&[0.0, 1.0, 2.0][..], &[0.0, 0.5, 1.0, 1.5, 2.0][..]] {
            for qv in [0.8, 1.2] {
                for al in [0.5, 1.0, 2.0] {
                    let s = solve_maxent(&problem(levels, qv, al, 0.3)).unwrap();
                    assert!(s.converged);
                    assert!(s.stationarity_residual <= 1e-8, "q={qv} alpha={al}: {}", s.stationarity_residual);
                    // phi = c Z_{q_alpha}
                    let qa = transform(q(qv), a(al)).unwrap().value();
                    assert!((s.phi - qa / (1.0 - qa) * s.z_q_alpha.z).abs() < 1e-12 * s.phi.abs());
                }
            }
        }
    }

    #[test]
    fn no_real_root_names_the_level() {
        // alpha = 2, q > 1: the lowest level gets the largest positive b
        let err = solve_maxent(&problem(&[0.0, 1.0, 2.0], 1.2, 2.0, 40.0)).unwrap_err();
        match err {
            Error::NoRealRoot { level: Some(i), b, .. } => {
                assert_eq!(i, 0);
                assert!(b > 0.25);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_reports_partial() {
        let opts = SolverOptions { max_iterations: 3, ..SolverOptions::default() };
        let err = solve_maxent_with(&problem(&[0.0, 1.0, 2.0], 1.2, 2.0, 0.3), &opts).unwrap_err();
        match err {
            Error::NonConvergence { partial } => {
                assert_eq!(partial.iterations, 3);
                assert!(!partial.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn renyi_matches_tsallis_under_reparametrization() {
        // R = ln(1 + (1-q_a) S) / (1-q_a) is monotone in S, so the Renyi
        // solution at Omega is the Tsallis solution at Omega * Z_{q_alpha}.
        let pr = problem(&[0.0, 1.0, 2.0, 3.0], 1.2, 2.0, 0.2);
        let r = solve_maxent_renyi(&pr).unwrap();
        assert!(r.stationarity_residual < 1e-8);
        let pt = problem(&[0.0, 1.0, 2.0, 3.0], 1.2, 2.0, 0.2 * r.z_q_alpha.z);
        let t = solve_maxent(&pt).unwrap();
        for (x, y) in r.probs.probs().iter().zip(t.probs.probs()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn gibbs_limit() {
        let sp = spectrum(&[0.0, 1.0, 2.5]);
        let g = solve_gibbs(&sp, DeformParam::ONE, 0.7).unwrap();
        let w: Vec<f64> = sp.levels().iter().map(|e| (-0.7 * e).exp()).collect();
        let z: f64 = w.iter().sum();
        for (p, wi) in g.probs.probs().iter().zip(&w) {
            assert!((p - wi / z).abs() < 1e-15);
        }
        assert!(g.stationarity_residual < 1e-14);
        // solve_maxent routes |q - 1| <= threshold here
        let s = solve_maxent(&MaxEntProblem::new(sp.clone(), q(1.0 + 1e-10), a(2.0), Constraint::Omega(0.7)).unwrap())
            .unwrap();
        assert_eq!(s.probs, g.probs);
    }

    #[test]
    fn shannon_limit_two_level_by_bisection() {
        // two levels: p = (t, 1 - t); the stationarity condition is one
        // equation in t, solved here by bisection on the log-ratio form
        let (qv, omega) = (1.3, 0.4);
        let sp = spectrum(&[0.0, 1.0]);
        let s = solve_maxent_shannon_limit(&sp, q(qv), &Constraint::Omega(omega)).unwrap();
        assert!(s.stationarity_residual < 1e-8);
        let f = |t: f64| {
            let p = [t, 1.0 - t];
            let zq = p[0].powf(qv) + p[1].powf(qv);
            let mean = p[1].powf(qv) / zq;
            // ln p0 - ln p1 = -(k0 p0^(q-1) - k1 p1^(q-1))
            let k0 = qv * omega * (0.0 - mean) / zq;
            let k1 = qv * omega * (1.0 - mean) / zq;
            (p[0] / p[1]).ln() + k0 * p[0].powf(qv - 1.0) - k1 * p[1].powf(qv - 1.0)
        };
        let (mut lo, mut hi) = (0.5, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((s.probs.probs()[0] - 0.5 * (lo + hi)).abs() < 1e-10);
    }

    #[test]
    fn shannon_limit_near_additive_matches_gibbs() {
        let sp = spectrum(&[0.0, 0.7, 1.1, 2.0]);
        let g = solve_gibbs(&sp, DeformParam::ONE, 0.9).unwrap();
        for d in [1e-7, -1e-7, 1e-8] {
            let s =
                solve_maxent_shannon_limit(&sp, DeformParam::from_offset(d).unwrap(), &Constraint::Omega(0.9)).unwrap();
            for (x, y) in s.probs.probs().iter().zip(g.probs.probs()) {
                assert!((x - y).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn large_alpha_approaches_shannon_limit() {
        let sp = spectrum(&[0.0, 1.0, 2.0]);
        let lim = solve_maxent_shannon_limit(&sp, q(1.2), &Constraint::Omega(0.3)).unwrap();
        let mut prev_gap = f64::INFINITY;
        for al in [10.0, 100.0, 1000.0] {
            let s = solve_maxent(&problem(&[0.0, 1.0, 2.0], 1.2, al, 0.3)).unwrap();
            let gap = s.probs.probs().iter().zip(lim.probs.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3);
    }

    #[test]
    fn target_mean_mode() {
        let sp = spectrum(&[0.0, 1.0, 2.0]);
        for (qv, al, target) in [(1.2, 2.0, 0.8), (0.8, 1.0, 1.3), (1.2, 0.5, 0.5)] {
            let pr = MaxEntProblem::new(sp.clone(), q(qv), a(al), Constraint::target_mean(target)).unwrap();
            let s = solve_maxent(&pr).unwrap();
            assert!((s.escort_mean - target).abs() < 1e-10, "q={qv} alpha={al}");
            assert!(s.stationarity_residual < 1e-8);
            // the reported multiplier reproduces the solution
            let again = solve_maxent(&problem(&[0.0, 1.0, 2.0], qv, al, s.omega)).unwrap();
            assert!((again.escort_mean - target).abs() < 1e-10);
        }
        let pr = MaxEntProblem::new(sp.clone(), q(1.2), a(2.0), Constraint::target_mean(2.5)).unwrap();
        assert!(matches!(solve_maxent(&pr), Err(Error::TargetOutOfRange { .. })));
    }

    #[test]
    fn partition_bound_examples() {
        for n in [2usize, 5, 17] {
            let u = Distribution::uniform(n).unwrap();
            let c = partition_bound_check(&u, q(2.0)).unwrap();
            let expect = (n as f64).powf(-0.5);
            assert!((c.lhs - expect).abs() < 1e-15 && (c.rhs - expect).abs() < 1e-15);
        }
        let d = Distribution::delta(3, 1).unwrap();
        let c = partition_bound_check(&d, q(0.7)).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 1.0));
        let p = Distribution::new(vec![0.9, 0.1]).unwrap();
        let c = partition_bound_check(&p, q(2.0)).unwrap();
        assert!((c.lhs - (0.9f64.powf(1.5) + 0.1f64.powf(1.5))).abs() < 1e-15);
        assert!((c.lhs - 0.885438).abs() < 1e-6);
        assert!((c.rhs - 0.82f64.sqrt()).abs() < 1e-15);
        assert!(c.lhs < c.rhs);
        assert!(partition_bound_check(&p, q(-0.5)).is_err());
    }
}
