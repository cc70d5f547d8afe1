//! MaxEnt distributions of rescaled-index entropies under escort energy
//! constraints, and the root finders they reduce to.

mod lambert;
mod solver;
mod trinomial;

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use lambert::lambert_w;
pub use solver::{
    partition_bound_check, solve_gibbs, solve_maxent, solve_maxent_renyi, solve_maxent_renyi_with,
    solve_maxent_shannon_limit, solve_maxent_shannon_limit_with, solve_maxent_with, trinomial_b, Constraint,
    MaxEntProblem, MaxEntSolution, PartitionBound, SolverOptions, ADDITIVE_THRESHOLD, DEFAULT_OMEGA_BRACKET,
};
pub use trinomial::{
    generalized_binomial, series_coefficient, series_coefficient_exact, series_radius, solve_trinomial,
    trinomial_series, RootMethod, SeriesSum, SignedLog, TrinomialProblem, TrinomialRoot, SERIES_SAFETY,
};

/// Energy levels `E_k` of a finite system, at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    levels: Vec<f64>,
}

impl EnergySpectrum {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidParameter { what: "energy spectrum", reason: "needs at least 2 levels" });
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite { what: "energy level" });
        }
        Ok(EnergySpectrum { levels })
    }

    #[inline]
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    /// Always false; a spectrum has at least two levels.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.levels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.levels.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// All levels equal.
    pub fn is_degenerate(&self) -> bool {
        self.levels.iter().all(|&e| e == self.levels[0])
    }
}
