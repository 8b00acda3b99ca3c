//! Copula-based stationary Markov chains on the unit interval.
//!
//! A stationary chain with uniform marginal is determined by the copula
//! of two consecutive states. This crate builds such copulas (mixture,
//! bilinear, tabulated, Archimedean, and stay-probability-kernel
//! families), composes them with the fold product, discretizes their
//! transfer operators to estimate the maximal correlation rho_1 and the
//! mixing coefficients beta_n / phi_n, evaluates closed-form bounds on
//! those rates, checks small-set and drift certificates of geometric
//! ergodicity, and samples trajectories exactly.
//!
//! All integrals run over a [`grid::Grid`] (composite midpoint by
//! default, Gauss-Legendre for smooth integrands); quadrature-derived
//! quantities carry the grid tolerance 5/N.

pub mod archimedean;
pub mod bounds;
pub mod error;
pub mod families;
pub mod fold;
pub mod grid;
pub mod model;
pub mod registry;
pub mod simulate;
pub mod spectral;
pub mod ergodicity;

pub use error::{Error, Result};
pub use grid::{Grid, Scheme};
pub use model::{conditional_cdf, validate_copula, AtomicMap, CopulaModel, MapKind, ValidationReport};
pub use fold::{fold, fold_powers, n_step};
