//! Nonparametric estimation of linear functionals ⟨f, μ⟩ of the jump measure
//! of a pure-jump Lévy process observed at a fixed sampling step, with
//! adaptive bandwidth selection by penalized comparison.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod ecf;
pub mod error;
pub mod estimator;
pub mod functionals;
pub mod harness;
pub mod models;
pub mod par;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
