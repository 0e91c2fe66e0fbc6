//! Independent checks of the propagator solution.

mod checks;
mod oracle;
mod report;

pub use checks::{
    bound_probe_lemma5, classical_limit_check, duhamel_equivalence_check, laplace_identity_check,
    oracle_check, oracle_check_many, relative_error, residual_check, residual_check_bundle,
    residual_sup, ProbeKind,
};
pub use oracle::{ode_oracle, ode_oracle_many, OracleCase, OracleSolution};
pub use report::{CheckResult, Status, VerificationReport};
