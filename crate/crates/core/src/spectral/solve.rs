use super::field::{frequency, SpectralField};
use super::forcing::ForcingField;
use crate::error::{Error, Result};
use crate::propagator::{Propagator, CONTOUR_ACCURACY};
use crate::symbols::TriangularSystem;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;

/// Default absolute tolerance of the Duhamel integral per mode.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Worker threads; 0 lets rayon choose.
    pub workers: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_SOLVE_TOL,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTiming {
    pub k: Vec<i64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BundleMeta {
    pub tol: f64,
    pub workers: usize,
    /// Propagator terms per mode (identical across modes up to pruning); the maximum is kept.
    pub term_count: usize,
    pub mode_seconds: Vec<ModeTiming>,
}

/// `U(t, x)` sampled at a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub times: Vec<f64>,
    /// `fields[t][i]` is component `i` at `times[t]`.
    pub fields: Vec<Vec<SpectralField>>,
    pub meta: BundleMeta,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleJson {
    schema: u32,
    times: Vec<f64>,
    fields: Vec<Vec<serde_json::Value>>,
    #[serde(default)]
    meta: BundleMeta,
}

impl SolutionBundle {
    pub fn m(&self) -> usize {
        self.fields.first().map_or(0, Vec::len)
    }

    /// `Û_i(t_s, ξ_k)`.
    pub fn mode(&self, time_index: usize, k: &[i64]) -> Vec<Complex64> {
        self.fields[time_index].iter().map(|f| f.get(k)).collect()
    }

    /// Union of the lattice vectors stored in any field.
    pub fn lattice(&self) -> Vec<Vec<i64>> {
        let set: BTreeSet<Vec<i64>> = self
            .fields
            .iter()
            .flatten()
            .flat_map(|f| f.modes().map(|(k, _)| k.clone()))
            .collect();
        set.into_iter().collect()
    }

    /// Same times and amplitudes, metadata ignored.
    pub fn same_values(&self, other: &SolutionBundle) -> bool {
        self.times == other.times && self.fields == other.fields
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = BundleJson {
            schema: 1,
            times: self.times.clone(),
            fields: self
                .fields
                .iter()
                .map(|row| row.iter().map(SpectralField::to_json_value).collect())
                .collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_value(j).expect("bundle serialises")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let j: BundleJson = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!(
                "solution bundle, line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        if j.schema != 1 {
            return Err(Error::Config(format!(
                "solution bundle: unsupported schema {}",
                j.schema
            )));
        }
        if j.fields.len() != j.times.len() {
            return Err(Error::Config(format!(
                "solution bundle: {} times but {} field rows",
                j.times.len(),
                j.fields.len()
            )));
        }
        let fields = j
            .fields
            .iter()
            .map(|row| {
                row.iter()
                    .map(SpectralField::from_json_value)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if fields.iter().any(|row| row.len() != fields[0].len()) {
            return Err(Error::Config(
                "solution bundle: component count varies between times".into(),
            ));
        }
        Ok(SolutionBundle {
            times: j.times,
            fields,
            meta: j.meta,
        })
    }

    /// Rows `t,component,x1,...,xn,value` on an `N^n` grid (real part, one-based component).
    pub fn to_csv(&self, points: usize) -> Result<String> {
        let n = self
            .fields
            .first()
            .and_then(|r| r.first())
            .map_or(1, SpectralField::n);
        let mut out = String::from("t,component,");
        for i in 1..=n {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("value\n");
        for (t, row) in self.times.iter().zip(&self.fields) {
            for (i, f) in row.iter().enumerate() {
                let csv = f.to_grid_csv(points)?;
                for line in csv.lines().skip(1) {
                    out.push_str(&format!("{t:.16e},{},{line}\n", i + 1));
                }
            }
        }
        Ok(out)
    }
}

fn annotate(e: Error, xi: &[f64], t: f64) -> Error {
    let at = format!("(ξ = {xi:?}, t = {t})");
    match e {
        Error::Tolerance {
            context,
            achieved,
            tol,
        } => Error::Tolerance {
            context: format!("{context} {at}"),
            achieved,
            tol,
        },
        Error::Domain(s) => Error::Domain(format!("{s} {at}")),
        Error::InvalidSystem(s) => Error::InvalidSystem(format!("{s} {at}")),
        other => other,
    }
}

/// Û(t, ξ_k) for every `t` in `times`, or the first failing time.
fn solve_mode(
    sys: &TriangularSystem,
    k: &[i64],
    phi: &[SpectralField],
    h: &ForcingField,
    times: &[f64],
    tol: f64,
) -> Result<(Vec<Vec<Complex64>>, usize)> {
    let xi = frequency(k, h.period());
    let prop = Propagator::new(sys, &xi).map_err(|e| annotate(e, &xi, f64::NAN))?;
    let phi_hat: Vec<Complex64> = phi.iter().map(|f| f.get(k)).collect();
    let forced = !h.vanishes_at(k);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            out.push(phi_hat.clone());
            continue;
        }
        let mut u = prop.apply_s(t, &phi_hat).map_err(|e| annotate(e, &xi, t))?;
        if forced {
            let d = prop
                .duhamel_term(t, |tau| h.mode_at(k, tau), tol)
                .map_err(|e| annotate(e, &xi, t))?;
            for (a, b) in u.iter_mut().zip(d) {
                *a += b;
            }
        }
        out.push(u);
    }
    Ok((out, prop.term_count()))
}

/// `Û(t, ξ) = S(t, ξ) Φ̂(ξ) + ∫_0^t S′(η, ξ) Ĥ(t-η, ξ) dη` on the union of the
/// lattices of `phi` and `h`.
///
/// Modes are independent; with `workers > 1` they are distributed over a
/// rayon pool and gathered in lattice order, so the amplitudes do not depend
/// on the worker count. At `t = 0` every amplitude is copied from `Φ`; modes
/// present only in the forcing appear there with amplitude zero.
pub fn solve(
    sys: &TriangularSystem,
    phi: &[SpectralField],
    h: &ForcingField,
    times: &[f64],
    opts: SolveOptions,
) -> Result<SolutionBundle> {
    let m = sys.m();
    if phi.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: phi.len(),
        });
    }
    if h.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: h.m(),
        });
    }
    if h.n() != sys.n() {
        return Err(Error::DimensionMismatch {
            expected: sys.n(),
            got: h.n(),
        });
    }
    for (i, f) in phi.iter().enumerate() {
        if f.n() != h.n() || f.period() != h.period() {
            return Err(Error::SizeMismatch(format!(
                "initial component {} is not on the forcing torus (n = {}, L = {})",
                i + 1,
                h.n(),
                h.period()
            )));
        }
    }
    if times.is_empty() {
        return Err(Error::domain("no output times requested"));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::domain(format!(
            "output time {t} must be finite and >= 0"
        )));
    }
    if !(opts.tol >= CONTOUR_ACCURACY) {
        return Err(Error::Tolerance {
            context: "solve".into(),
            achieved: CONTOUR_ACCURACY,
            tol: opts.tol,
        });
    }

    let lattice: Vec<Vec<i64>> = phi
        .iter()
        .flat_map(|f| f.modes().map(|(k, _)| k.clone()))
        .chain(
            h.components()
                .iter()
                .flat_map(|c| c.spatial.modes().map(|(k, _)| k.clone())),
        )
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let run = |k: &Vec<i64>| {
        let start = Instant::now();
        solve_mode(sys, k, phi, h, times, opts.tol).map(|r| (r, start.elapsed().as_secs_f64()))
    };
    let results: Vec<_> = if opts.workers == 1 {
        lattice.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
        pool.install(|| lattice.par_iter().map(run).collect())
    };

    let n = h.n();
    let period = h.period();
    let mut fields: Vec<Vec<SpectralField>> = times
        .iter()
        .map(|_| {
            (0..m)
                .map(|_| SpectralField::new(n, period))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut meta = BundleMeta {
        tol: opts.tol,
        workers: opts.workers,
        term_count: 0,
        mode_seconds: Vec::new(),
    };
    for (k, res) in lattice.iter().zip(results) {
        let ((values, terms), secs) = res?;
        meta.term_count = meta.term_count.max(terms);
        meta.mode_seconds.push(ModeTiming {
            k: k.clone(),
            seconds: secs,
        });
        for (row, u) in fields.iter_mut().zip(values) {
            for (f, c) in row.iter_mut().zip(u) {
                f.add_mode(k.clone(), c)?;
            }
        }
    }
    Ok(SolutionBundle {
        times: times.to_vec(),
        fields,
        meta,
    })
}
