//! Fractal interpolation functions, graph-dimension prediction and
//! dimension preserving approximation of continuous functions on `[0, 1]`.
//!
//! The crate is organised bottom-up:
//!
//! * [`func`]: evaluable functions on the unit interval, uniform grids,
//!   sup-norm and Lipschitz estimates.
//! * [`bernstein`]: the Bernstein operator, its derivative and the
//!   weighted second modulus of smoothness.
//! * [`fif`]: affine fractal interpolation functions and α-fractal
//!   functions as fixed points of the Read–Bajraktarević operator, plus a
//!   seeded chaos game.
//! * [`dimension`]: closed-form box/Hausdorff dimension predictors and an
//!   empirical box-counting estimator.
//! * [`approx`]: constructive pipelines producing approximants with a
//!   prescribed graph dimension.
//!
//! All grid quantities (sup norms, Lipschitz constants, moduli of
//! smoothness) are computed on finite grids and are therefore lower bounds
//! of the exact values.

// Comparisons are written as `!(x < y)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bernstein;
pub mod dimension;
mod error;
pub mod fif;
pub mod func;

pub use error::{Error, Result};
