//! Rational Dunkl operators over finite root systems, quadrature against the
//! Dunkl measure `w_k(x) dx`, the rank-one Dunkl kernel and heat semigroup,
//! closed-form sharp constants, weighted rearrangement, and a registry of
//! numerical checks for the associated functional inequalities.
//!
//! The crate is organised bottom-up:
//!
//! - [`rootsys`]: root systems, reflection groups, Weyl chambers, the weight `w_k`.
//! - [`fields`]: scalar test fields and the pointwise Dunkl calculus.
//! - [`quadrature`]: adaptive cubature on chamber-aligned cells, norms, perimeters.
//! - [`kernels`]: Dunkl kernel, heat kernel, heat semigroup, transform, Besov norm.
//! - [`constants`]: closed forms of every named constant.
//! - [`rearrange`]: symmetric decreasing rearrangement on a chamber.
//! - [`verify`]: the named check registry and the suite runner.
//! - [`config`]: suite configuration and root-system shorthands.

pub mod error;
pub mod estimate;
pub mod config;
pub mod constants;
pub mod fields;
pub mod kernels;
pub mod quadrature;
pub mod rearrange;
pub mod rootsys;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use estimate::Estimate;
pub use fields::ScalarField;
pub use rootsys::{Family, RootSystem};

/// Small inline vector used for points and gradients.
pub type Vector = smallvec::SmallVec<[f64; 4]>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
