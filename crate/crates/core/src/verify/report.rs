use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational; never affects the overall verdict.
    Diagnostic,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Diagnostic => "DIAG",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// The identity or estimate being exercised.
    pub property: String,
    pub status: Status,
    pub error: f64,
    pub tol: f64,
    pub runtime_seconds: f64,
    #[serde(default)]
    pub details: serde_json::Value,
}

impl CheckResult {
    pub(crate) fn graded(name: &str, property: &str, error: f64, tol: f64) -> Self {
        let status = if error <= tol {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckResult {
            name: name.into(),
            property: property.into(),
            status,
            error,
            tol,
            runtime_seconds: 0.0,
            details: serde_json::Value::Null,
        }
    }

    pub(crate) fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    pub(crate) fn timed(mut self, start: std::time::Instant) -> Self {
        self.runtime_seconds = start.elapsed().as_secs_f64();
        self
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<24} error {:.3e} (tol {:.1e}, {:.2} s)",
            self.status, self.name, self.error, self.tol, self.runtime_seconds
        )
    }
}

/// Check results ordered by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: CheckResult) {
        let at = self.checks.partition_point(|c| c.name <= check.name);
        self.checks.insert(at, check);
    }

    pub fn checks(&self) -> &[CheckResult] {
        &self.checks
    }

    /// No pass/fail check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

impl Extend<CheckResult> for VerificationReport {
    fn extend<I: IntoIterator<Item = CheckResult>>(&mut self, iter: I) {
        for c in iter {
            self.push(c);
        }
    }
}
