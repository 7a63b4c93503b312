//! Evaluators for G-Wishart normalising constants.
//!
//! The constant of a graph `G` with shape `delta` and scale `D` is
//!
//! ```text
//! C_G(delta, D) = ∫_{S++(G)} det(K)^((delta-2)/2) exp(-tr(KD)/2) dK
//! ```
//!
//! where `S++(G)` is the cone of positive-definite matrices with zeros at the
//! non-edges of `G`. This crate computes it four ways:
//!
//! * [`constants::chordal_constant`]: exact clique/separator factorisation for chordal graphs.
//! * [`fourier::fourier_constant`]: a one-dimensional integral over a single perturbed edge,
//!   for graphs that become chordal after adding one edge.
//! * [`montecarlo::mc_constant`]: a Cholesky-parameterised importance estimator for any graph.
//! * [`constants::roverato_estimate`]: the closed form built from the PD-completion and the
//!   Isserlis matrix, exact for chordal graphs and an approximation otherwise.
//!
//! Everything is `no_std` with `alloc`; file formats and the command-line front end live in
//! the companion `gwishart` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod completion;
pub mod constants;
mod error;
pub mod fourier;
pub mod graph;
pub mod logscalar;
pub mod montecarlo;
pub mod quadrature;
pub mod symmat;

pub use error::{Error, Result};
pub use graph::{CliqueDecomposition, Graph, PairClassification};
pub use logscalar::LogScalar;
pub use symmat::{ComplexSymmetricMatrix, PerturbationEdge, SymmetricMatrix};
