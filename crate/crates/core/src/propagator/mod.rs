//! Solution-operator symbols `S(t, ξ)` and `S′(η, ξ)` of a lower-triangular
//! system, expanded over strictly decreasing index paths, and the Duhamel
//! integrals built on them.

mod duhamel;
mod eval;
mod paths;

pub use duhamel::{duhamel_alt, duhamel_term, ALT_FORCING_SAMPLES};
pub use eval::{apply_s, s_entry, sprime_entry, Head, Propagator, CONTOUR_ACCURACY};
pub use paths::{enumerate_paths, propagator_terms, Path, PropagatorTerm};
