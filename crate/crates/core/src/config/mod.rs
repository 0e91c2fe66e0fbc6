//! JSON run configuration (`"schema": 1`) shared by the command-line tool.
//!
//! Paths inside a configuration are resolved against the directory of the
//! configuration file.

use crate::error::{Error, Result};
use crate::spectral::{
    ForcingComponent, ForcingField, SpectralField, TimeProfile, DEFAULT_SOLVE_TOL,
};
use crate::symbols::{SystemSpec, TriangularSystem};
use num_complex::Complex64;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// Inline system description or the path of a JSON file holding one.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Inline(SystemSpec),
    File(String),
}

impl<'de> Deserialize<'de> for SystemSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SystemSource;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a system object or a file path")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SystemSource, E> {
                Ok(SystemSource::File(v.to_string()))
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                map: A,
            ) -> std::result::Result<SystemSource, A::Error> {
                SystemSpec::deserialize(de::value::MapAccessDeserializer::new(map))
                    .map(SystemSource::Inline)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A spatial field: inline modes, a JSON field file, or a grid CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub period: Option<f64>,
    pub n: Option<usize>,
    pub modes: Option<Vec<ModeSpec>>,
    pub file: Option<String>,
    pub grid_csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub spatial: FieldSpec,
    pub profile: TimeProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub solve: f64,
    pub residual: f64,
    pub oracle: f64,
    pub duhamel: f64,
    pub laplace: f64,
    pub classical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            solve: DEFAULT_SOLVE_TOL,
            residual: 1e-2,
            oracle: 1e-3,
            duhamel: 1e-4,
            laplace: 1e-6,
            classical: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub format: OutputFormat,
    /// Points per axis of CSV grids.
    pub grid_points: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            format: OutputFormat::Csv,
            grid_points: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaplaceSpec {
    pub beta: f64,
    pub lambda: f64,
    pub s: Vec<f64>,
}

impl Default for LaplaceSpec {
    fn default() -> Self {
        LaplaceSpec {
            beta: 0.5,
            lambda: 1.0,
            s: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub i: usize,
    pub q: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub sprime: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    /// Solution bundle (JSON) to check instead of solving afresh.
    pub solution: Option<String>,
    pub residual_intervals: Vec<usize>,
    pub oracle_steps: usize,
    /// Lattice vectors compared against the oracle; empty means the lowest
    /// non-zero modes of the data (at most three).
    pub oracle_modes: Vec<Vec<i64>>,
    pub duhamel_xi: Option<Vec<f64>>,
    pub duhamel_time: f64,
    pub laplace: LaplaceSpec,
    pub probe: Option<ProbeSpec>,
    pub tau: Option<f64>,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            solution: None,
            residual_intervals: vec![32, 64, 128, 256],
            oracle_steps: 4096,
            oracle_modes: Vec::new(),
            duhamel_xi: None,
            duhamel_time: 1.0,
            laplace: LaplaceSpec::default(),
            probe: None,
            tau: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema: u32,
    pub system: SystemSource,
    #[serde(default)]
    pub initial: Vec<FieldSpec>,
    #[serde(default)]
    pub forcing: Vec<ForcingSpec>,
    #[serde(default)]
    pub times: Vec<f64>,
    pub horizon: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    pub workers: Option<usize>,
    #[serde(default)]
    pub verify: VerifySpec,
}

/// A parsed configuration together with the directory its paths refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub base_dir: PathBuf,
}

fn located(source: &str, e: serde_json::Error) -> Error {
    // serde_json appends "at line L column C"
    Error::Config(format!("{source}: {e}"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str_in(&text, &path.display().to_string(), base)
    }

    /// Parses `text`; `source` names it in diagnostics.
    pub fn from_str_in(text: &str, source: &str, base_dir: PathBuf) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| located(source, e))?;
        if raw.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "{source}: field \"schema\": unsupported version {} (expected {SCHEMA_VERSION})",
                raw.schema
            )));
        }
        let t = &raw.tolerances;
        for (name, v) in [
            ("solve", t.solve),
            ("residual", t.residual),
            ("oracle", t.oracle),
            ("duhamel", t.duhamel),
            ("laplace", t.laplace),
            ("classical", t.classical),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!(
                    "{source}: field \"tolerances.{name}\": {v} must be positive"
                )));
            }
        }
        if raw.workers == Some(0) {
            return Err(Error::Config(format!(
                "{source}: field \"workers\": must be at least 1"
            )));
        }
        Ok(RunConfig { raw, base_dir })
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        let p = Path::new(rel);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The system. Orders outside `(0, 1]` are [`Error::Domain`], every other
    /// problem is [`Error::Config`].
    pub fn system(&self) -> Result<TriangularSystem> {
        let spec = match &self.raw.system {
            SystemSource::Inline(s) => s.clone(),
            SystemSource::File(f) => {
                let path = self.resolve(f);
                serde_json::from_str(&read(&path)?)
                    .map_err(|e| located(&path.display().to_string(), e))?
            }
        };
        spec.build().map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("field \"system\": {msg}")),
            other => other,
        })
    }

    fn field(&self, spec: &FieldSpec, what: &str) -> Result<SpectralField> {
        let ctx = |e: Error| Error::Config(format!("field \"{what}\": {e}"));
        match (&spec.modes, &spec.file, &spec.grid_csv) {
            (Some(modes), None, None) => {
                let period = spec
                    .period
                    .ok_or_else(|| ctx(Error::Config("\"period\" is required".into())))?;
                let n = match (spec.n, modes.first()) {
                    (Some(n), _) => n,
                    (None, Some(m)) => m.k.len(),
                    (None, None) => {
                        return Err(ctx(Error::Config(
                            "\"n\" is required when \"modes\" is empty".into(),
                        )))
                    }
                };
                SpectralField::from_modes(
                    n,
                    period,
                    modes
                        .iter()
                        .map(|m| (m.k.clone(), Complex64::new(m.re, m.im))),
                )
                .map_err(ctx)
            }
            (None, Some(file), None) => {
                let path = self.resolve(file);
                let v: serde_json::Value = serde_json::from_str(&read(&path)?)
                    .map_err(|e| located(&path.display().to_string(), e))?;
                SpectralField::from_json_value(&v).map_err(ctx)
            }
            (None, None, Some(csv)) => {
                let period = spec
                    .period
                    .ok_or_else(|| ctx(Error::Config("\"period\" is required".into())))?;
                let path = self.resolve(csv);
                // drop round-off modes so the solver only visits the data's support
                Ok(SpectralField::from_grid_csv(&read(&path)?, period)
                    .map_err(ctx)?
                    .pruned(1e-14))
            }
            _ => Err(ctx(Error::Config(
                "give exactly one of \"modes\", \"file\" or \"grid_csv\"".into(),
            ))),
        }
    }

    /// Initial data, one field per equation.
    pub fn initial(&self, sys: &TriangularSystem) -> Result<Vec<SpectralField>> {
        if self.raw.initial.len() != sys.m() {
            return Err(Error::Config(format!(
                "field \"initial\": {} fields for a system of {} equations",
                self.raw.initial.len(),
                sys.m()
            )));
        }
        let fields = self
            .raw
            .initial
            .iter()
            .enumerate()
            .map(|(i, s)| self.field(s, &format!("initial[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        for (i, f) in fields.iter().enumerate() {
            if f.n() != sys.n() || !f.same_lattice_space(&fields[0]) {
                return Err(Error::Config(format!(
                    "field \"initial[{i}]\": must have n = {} and the period of initial[0]",
                    sys.n()
                )));
            }
        }
        Ok(fields)
    }

    /// Forcing on the torus of the initial data; zero when none is given.
    pub fn forcing(
        &self,
        sys: &TriangularSystem,
        initial: &[SpectralField],
    ) -> Result<ForcingField> {
        let period = initial[0].period();
        if self.raw.forcing.is_empty() {
            return ForcingField::zero(sys.m(), sys.n(), period);
        }
        if self.raw.forcing.len() != sys.m() {
            return Err(Error::Config(format!(
                "field \"forcing\": {} components for a system of {} equations",
                self.raw.forcing.len(),
                sys.m()
            )));
        }
        let comps = self
            .raw
            .forcing
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let spatial = self.field(&f.spatial, &format!("forcing[{i}].spatial"))?;
                if !spatial.same_lattice_space(&initial[0]) {
                    return Err(Error::Config(format!(
                        "field \"forcing[{i}].spatial\": must share the initial torus"
                    )));
                }
                Ok(ForcingComponent {
                    spatial,
                    profile: f.profile.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ForcingField::new(comps).map_err(|e| Error::Config(format!("field \"forcing\": {e}")))
    }

    /// Output times: non-empty, non-negative, and within the horizon if one is set.
    pub fn times(&self) -> Result<Vec<f64>> {
        let times = &self.raw.times;
        if times.is_empty() {
            return Err(Error::Config("field \"times\": the list is empty".into()));
        }
        let horizon = self.horizon();
        for (i, &t) in times.iter().enumerate() {
            if !(t >= 0.0 && t <= horizon) {
                return Err(Error::Config(format!(
                    "field \"times[{i}]\": {t} is outside [0, {horizon}]"
                )));
            }
        }
        Ok(times.clone())
    }

    /// `T`: the configured horizon, else the largest output time (1 without times).
    pub fn horizon(&self) -> f64 {
        self.raw
            .horizon
            .unwrap_or_else(|| self.raw.times.iter().copied().fold(f64::NAN, f64::max))
            .max(if self.raw.times.is_empty() { 1.0 } else { 0.0 })
    }
}
