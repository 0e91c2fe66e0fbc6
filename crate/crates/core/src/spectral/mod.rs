//! Mode-by-mode solution of the Cauchy problem on a periodic box.

mod field;
mod forcing;
mod hypotheses;
mod solve;

pub use field::{apply_operator, frequency, sobolev_norm, SpectralField};
pub use forcing::{ForcingComponent, ForcingField, TimeProfile};
pub use hypotheses::{check_hypotheses, ComponentHypothesis, HypothesisReport};
pub use solve::{solve, BundleMeta, ModeTiming, SolutionBundle, SolveOptions, DEFAULT_SOLVE_TOL};
