//! Discrete fractional operators on time grids and product quadrature for
//! convolutions of kernels with algebraic endpoint singularities.

mod conv;
mod grid;
mod operators;
pub mod quadrature;

pub use conv::{conv_chain, conv_singular, conv_singular_with, DEFAULT_CONV_TOL, PANEL_NODES};
pub use grid::{default_grading, Sample, SampledFunction, TimeGrid};
pub use operators::{caputo_l1, rl_derivative, rl_integral, rl_integral_all};
