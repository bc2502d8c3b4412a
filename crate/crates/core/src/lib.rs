//! Bivariate generalized linear failure rate power-series distributions.
//!
//! A pair `(Y1, Y2)` is the componentwise maximum of `N` independent pairs
//! from a bivariate GLFR law, with `N` zero-truncated power-series
//! distributed. The crate evaluates cdfs and densities (including the
//! singular part on the diagonal), samples, and fits by EM.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bglfr;
pub mod bglfrps;
pub mod data;
pub mod error;
pub mod fitting;
pub mod glfr;
pub mod glfrps;
pub mod gof;
pub mod optim;
pub mod powerseries;
pub mod quadrature;

pub use error::{Error, Result};
