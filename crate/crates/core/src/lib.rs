//! Majorization relations between vector-valued step functions on finite
//! atomic measure spaces.
//!
//! Every relation is decided constructively: a positive answer carries a
//! stochastic (or doubly stochastic) kernel mapping one function onto the
//! other, a negative answer carries a sublinear functional whose weighted
//! sums separate the two functions.
//!
//! - [`measure`]: measure spaces, step functions, decreasing rearrangements.
//! - [`kernels`]: stochastic kernels and their action on step functions.
//! - [`discretize`]: partitions, block averaging, level-set refinement.
//! - [`functionals`]: max-linear / max-affine functionals, perspective, divergences.
//! - [`lp`]: phase-I simplex feasibility with Farkas certificates.
//! - [`majorize`]: vector, continuous, matrix and multivariate majorization.

#![forbid(unsafe_code)]

pub mod discretize;
pub mod error;
pub mod functionals;
pub mod kernels;
pub mod lp;
pub mod majorize;
pub mod measure;
pub mod tolerance;

pub use error::{Error, Result};
pub use functionals::{ConvexFunctional, SublinearFunctional};
pub use kernels::{DoublyStochasticKernel, StochasticKernel};
pub use measure::{FiniteMeasureSpace, RearrangedStep, VectorStepFunction};
