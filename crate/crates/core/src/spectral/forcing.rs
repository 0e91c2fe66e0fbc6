use super::field::SpectralField;
use crate::error::{Error, Result};
use crate::frac_calculus::{SampledFunction, TimeGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Temporal factor of a forcing component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TimeProfile {
    /// `c`
    Constant { value: f64 },
    /// `c t^γ`, `γ ≥ 0`
    Monomial {
        #[serde(default = "one")]
        coeff: f64,
        power: f64,
    },
    /// `c e^{a t}`
    Exponential {
        #[serde(default = "one")]
        coeff: f64,
        rate: f64,
    },
    /// Piecewise-linear interpolation of samples; held constant past the last node.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl TimeProfile {
    pub fn check(&self) -> Result<()> {
        match self {
            TimeProfile::Monomial { power, .. } if !(*power >= 0.0) => Err(Error::domain(format!(
                "monomial power {power} must be >= 0"
            ))),
            TimeProfile::Sampled { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::SizeMismatch(format!(
                        "{} sample times but {} values",
                        times.len(),
                        values.len()
                    )));
                }
                if times.first() != Some(&0.0) {
                    return Err(Error::domain("sampled forcing must start at t = 0"));
                }
                TimeGrid::from_nodes(times.clone()).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => *value,
            TimeProfile::Monomial { coeff, power } => {
                if *power == 0.0 {
                    *coeff
                } else {
                    coeff * t.powf(*power)
                }
            }
            TimeProfile::Exponential { coeff, rate } => coeff * (rate * t).exp(),
            TimeProfile::Sampled { times, values } => {
                let last = *times.last().expect("checked profile");
                if t >= last {
                    return *values.last().expect("checked profile");
                }
                let grid = TimeGrid::from_nodes(times.clone()).expect("checked profile");
                SampledFunction::new(grid, values.clone())
                    .expect("checked profile")
                    .interpolate(t)
            }
        }
    }

    /// `sup_{0 ≤ t ≤ T} |θ(t)|`.
    pub fn sup_abs(&self, horizon: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => value.abs(),
            TimeProfile::Monomial { coeff, power } => {
                if *power == 0.0 {
                    coeff.abs()
                } else {
                    coeff.abs() * horizon.powf(*power)
                }
            }
            TimeProfile::Exponential { coeff, rate } => {
                coeff.abs() * (rate * horizon).exp().max(1.0)
            }
            TimeProfile::Sampled { times, values } => times
                .iter()
                .zip(values)
                .take_while(|(t, _)| **t <= horizon)
                .map(|(_, v)| v.abs())
                .chain(std::iter::once(self.eval(horizon).abs()))
                .fold(0.0, f64::max),
        }
    }
}

/// One component `h_i(t, x) = θ_i(t) g_i(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingComponent {
    pub spatial: SpectralField,
    pub profile: TimeProfile,
}

/// Right-hand side `H(t, x)` with separable components.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingField {
    n: usize,
    period: f64,
    components: Vec<ForcingComponent>,
}

impl ForcingField {
    pub fn new(components: Vec<ForcingComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::domain("forcing needs at least one component"))?;
        let (n, period) = (first.spatial.n(), first.spatial.period());
        for (i, c) in components.iter().enumerate() {
            if !c.spatial.same_lattice_space(&first.spatial) {
                return Err(Error::SizeMismatch(format!(
                    "forcing component {} lives on a different torus than component 1",
                    i + 1
                )));
            }
            c.profile.check()?;
        }
        Ok(ForcingField {
            n,
            period,
            components,
        })
    }

    /// `H ≡ 0` with `m` components.
    pub fn zero(m: usize, n: usize, period: f64) -> Result<Self> {
        let spatial = SpectralField::new(n, period)?;
        Self::new(
            (0..m)
                .map(|_| ForcingComponent {
                    spatial: spatial.clone(),
                    profile: TimeProfile::Constant { value: 0.0 },
                })
                .collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn components(&self) -> &[ForcingComponent] {
        &self.components
    }

    /// `ĥ(t, ξ_k)`.
    pub fn mode_at(&self, k: &[i64], t: f64) -> Vec<Complex64> {
        self.components
            .iter()
            .map(|c| c.spatial.get(k) * c.profile.eval(t))
            .collect()
    }

    /// No component has a non-zero amplitude at `k`.
    pub fn vanishes_at(&self, k: &[i64]) -> bool {
        self.components
            .iter()
            .all(|c| c.spatial.get(k) == Complex64::new(0.0, 0.0) || is_zero(&c.profile))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| {
            c.spatial
                .modes()
                .all(|(_, v)| v == Complex64::new(0.0, 0.0))
                || is_zero(&c.profile)
        })
    }

    /// Spatial field of component `i` at time `t`.
    pub fn snapshot(&self, i: usize, t: f64) -> SpectralField {
        let c = &self.components[i];
        let scale = c.profile.eval(t);
        SpectralField::from_modes(
            self.n,
            self.period,
            c.spatial.modes().map(|(k, v)| (k.clone(), v * scale)),
        )
        .expect("scaled copy of a valid field")
    }
}

fn is_zero(p: &TimeProfile) -> bool {
    match p {
        TimeProfile::Constant { value } => *value == 0.0,
        TimeProfile::Monomial { coeff, .. } | TimeProfile::Exponential { coeff, .. } => {
            *coeff == 0.0
        }
        TimeProfile::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
    }
}
