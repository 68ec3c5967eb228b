//! # quadnn
//!
//! A solver for forward and inverse integral, integro-differential and
//! fractional problems — and optimal-control problems constrained by them —
//! built on a small neural network trained against a physics-informed loss.
//! Integral operators are discretized once, at setup time, into Gaussian
//! quadrature matrix/tensor-vector products; Caputo fractional derivatives
//! use an L1 operational matrix.
//!
//! The crate is organized along those lines:
//!
//! - [`quadrature`]: node/weight generation for the Gaussian families and
//!   the comparator integrators (trapezoid, Monte Carlo);
//! - [`tape`] and [`network`]: a reverse-mode differentiation tape and the
//!   multilayer perceptron evaluated on it;
//! - [`integral_ops`]: precomputed Fredholm/Volterra operators in one, two
//!   and three dimensions;
//! - [`fractional`]: the L1 Caputo scheme and its operational matrix;
//! - [`optimize`]: Adam and L-BFGS with the combined training schedule;
//! - [`problems`]: the declarative problem registry, residual/loss
//!   assembly, training drivers and run reports.
//!
//! Everything numeric runs in `f64`, single-threaded and deterministically
//! for fixed seeds; independent training sessions can run in parallel.

pub mod fractional;
pub mod integral_ops;
pub mod network;
pub mod optimize;
pub mod problems;
pub mod quadrature;
pub mod rng;
pub mod tape;

pub use network::{Activation, Mlp};
pub use quadrature::{Family, MappedRule, QuadratureRule};
pub use tape::{DiffTensor, Tape};
