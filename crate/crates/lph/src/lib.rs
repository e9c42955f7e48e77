//! Numerics for the Heisenberg group with an l^p sub-Finsler norm.
//!
//! The crate is organised bottom-up:
//!
//! * [`ptrig`]: p-trigonometric functions and their dual pairs.
//! * [`heis`]: group law, exponential map and an ODE oracle for it.
//! * [`jac`]: Jacobian of the exponential map and the exponent functional.
//! * [`mcp`]: measure contraction scans and curvature-exponent estimates.
//! * [`geodim`]: homothety volumes and geodesic-dimension fits.
//! * [`polygonal`]: the l^1 (and l^inf) case with polygonal geodesics.
//!
//! Grid scans run on rayon when the `parallel` feature is on (the default)
//! and sequentially otherwise; reductions always happen in index order so
//! both builds return bit-identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geodim;
pub mod heis;
pub mod jac;
pub mod mcp;
pub mod par;
pub mod polygonal;
pub mod ptrig;
pub mod quad;
mod series;

pub use error::{Error, Result};
pub use ptrig::{Exponent, Regime};
