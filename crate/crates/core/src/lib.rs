//! Solution operators for Cauchy problems `D_t^B U + A(D) U = H` where `A(D)`
//! is a lower-triangular matrix of constant-coefficient differential operators
//! with homogeneous elliptic diagonal and `B = <β_1, ..., β_m>` is a vector of
//! Caputo orders in `(0, 1]`.
//!
//! The crate is organised bottom-up:
//!
//! * [`mlf`] evaluates Mittag-Leffler functions and the kernels built on them;
//! * [`symbols`] holds polynomial symbols and the triangular operator matrix;
//! * [`frac_calculus`] has time grids, L1/Riemann-Liouville discretisations and
//!   singular convolution quadrature;
//! * [`propagator`] expands the solution-operator symbols `S(t, ξ)` and
//!   `S'(η, ξ)` over decreasing index paths;
//! * [`spectral`] applies the propagator mode by mode;
//! * [`verify`] holds the independent oracles and checks;
//! * [`config`] is the JSON run configuration shared with the CLI.

pub mod config;
pub mod error;
pub mod frac_calculus;
pub mod mlf;
pub mod propagator;
pub mod spectral;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use mlf::{mittag_leffler, ml_kernel, MLKernelSpec};
pub use propagator::{Path, PropagatorTerm};
pub use spectral::{ForcingField, SolutionBundle, SpectralField};
pub use symbols::{FracOrderVector, MultiIndex, PolySymbol, TriangularSystem};

pub use num_complex::Complex64;
