//! Lyapunov exponents and bifurcation diagrams for discrete-time maps.
//!
//! - [`maps`]: the [`DiscreteMap`] trait, the built-in logistic and Hénon
//!   maps, and orbit iteration.
//! - [`scalar`]: exponents of one-dimensional maps (derivative sum and
//!   finite difference) and parameter sweeps.
//! - [`bifurcation`]: orbit diagrams and attractor-point counting.
//! - [`linalg`] and [`tangent`]: small dense matrices, Householder QR,
//!   tangent propagation and a finite-time Gram-matrix spectrum.
//! - [`spectrum`]: Benettin renormalization, QR spectrum, the Hénon
//!   determinant identity, and a Jacobian-free two-orbit estimator.
//! - [`cli`]: the `chaoscope` command line and its CSV output.
//!
//! All exponents are in nats per iteration.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod maps;
mod parallel;
pub mod scalar;
pub mod spectrum;
pub mod tangent;

pub use error::{Error, Result};
pub use maps::{DiscreteMap, Henon, JacobianMode, LinearMap, Logistic, StateVector, Trajectory};
