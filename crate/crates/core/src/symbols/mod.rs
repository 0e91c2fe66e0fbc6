//! Polynomial symbols, the lower-triangular operator matrix `A(ξ)` and its
//! structural checks (order condition, homogeneity, ellipticity, Petrovsky
//! parabolicity).

mod poly;
mod system;
mod validate;

pub use poly::{MultiIndex, PolySymbol};
pub use system::{
    EntrySpec, FracOrderVector, SystemSpec, TermSpec, TriangularSystem, MAX_EQUATIONS,
};
pub use validate::{
    p_star_and_q, petrovsky_probe, sphere_points, validate_system, ValidationReport, Violation,
};
