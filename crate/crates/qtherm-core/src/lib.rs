//! # qtherm-core
//!
//! Numerical core for Tsallis thermostatistics with a rescaled nonadditivity
//! index. The crate is `#![no_std]` and only needs `alloc`.
//!
//! The central object is the one-parameter group acting on the index `q`,
//!
//! ```text
//! q_alpha = (q + alpha - 1) / alpha,     (q_alpha - 1) = (q - 1) / alpha
//! ```
//!
//! with `q_{alpha beta} = (q_alpha)_beta`, `q_1 = q` and `1_alpha = 1`.
//! Around it the crate provides:
//!
//! * [`deformation`]: the index and scale-factor types, the group action,
//!   additive (`2 - q`) and multiplicative (`1 / q`) dualities and the
//!   finite-heat-bath and temperature-fluctuation parameter maps.
//! * [`qalgebra`]: q-deformed sum, difference, product and quotient,
//!   `exp_q`/`ln_q`, and identity checks for the rescaling distributive laws.
//! * [`entropy`]: probability vectors, escort distributions, Tsallis, Shannon,
//!   Renyi, hybrid and average-hybrid entropies, and the quasi-additivity
//!   scale factor `1 + <I>^2 / <I^2>`.
//! * [`maxent`]: the trinomial equation `1 - x + b x^alpha = 0` (closed forms,
//!   generalized-binomial series, bracketed Newton), the principal Lambert W
//!   branch, and self-consistent MaxEnt solvers under escort energy
//!   constraints.
//!
//! ```
//! use qtherm_core::deformation::{transform, DeformParam, ScaleFactor};
//!
//! let q = DeformParam::new(1.5).unwrap();
//! let alpha = ScaleFactor::new(2.0).unwrap();
//! assert_eq!(transform(q, alpha).unwrap().value(), 1.25);
//! ```

#![no_std]
// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod deformation;
pub mod entropy;
mod error;
mod math;
pub mod maxent;
pub mod qalgebra;

pub use deformation::{DeformParam, ScaleFactor};
pub use entropy::Distribution;
pub use error::{Error, Result};
pub use maxent::EnergySpectrum;
