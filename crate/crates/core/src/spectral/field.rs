use crate::error::{Error, Result};
use crate::symbols::PolySymbol;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Band-limited periodic function `f(x) = Σ_k c_k e^{-i x·ξ_k}` with
/// `ξ_k = 2πk/L` on the integer lattice `k ∈ ℤ^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n: usize,
    period: f64,
    modes: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ModeJson {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    period: f64,
    modes: Vec<ModeJson>,
}

impl SpectralField {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("spatial dimension must be positive"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::domain(format!(
                "period L = {period} must be positive"
            )));
        }
        Ok(SpectralField {
            n,
            period,
            modes: BTreeMap::new(),
        })
    }

    /// Field with the given `(k, c_k)` pairs; repeated lattice vectors add up.
    pub fn from_modes(
        n: usize,
        period: f64,
        modes: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self> {
        let mut f = Self::new(n, period)?;
        for (k, c) in modes {
            f.add_mode(k, c)?;
        }
        Ok(f)
    }

    pub fn add_mode(&mut self, k: Vec<i64>, c: Complex64) -> Result<()> {
        if k.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: k.len(),
            });
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::domain(format!(
                "mode {k:?} has a non-finite amplitude"
            )));
        }
        *self.modes.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Modes in lattice order.
    pub fn modes(&self) -> impl Iterator<Item = (&Vec<i64>, Complex64)> {
        self.modes.iter().map(|(k, c)| (k, *c))
    }

    pub fn get(&self, k: &[i64]) -> Complex64 {
        self.modes
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `ξ_k = 2πk/L`.
    pub fn frequency(&self, k: &[i64]) -> Vec<f64> {
        frequency(k, self.period)
    }

    /// Drops modes with `|c_k| ≤ rel · max |c|`.
    pub fn pruned(mut self, rel: f64) -> Self {
        let max = self.modes.values().map(|c| c.norm()).fold(0.0, f64::max);
        self.modes.retain(|_, c| c.norm() > rel * max);
        self
    }

    /// `c_{-k} = conj(c_k)` for every stored mode, up to `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.modes.iter().all(|(k, c)| {
            let minus: Vec<i64> = k.iter().map(|x| -x).collect();
            (self.get(&minus) - c.conj()).norm() <= tol
        })
    }

    /// `f(x)`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| {
                let phase: f64 = frequency(k, self.period)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum();
                c * Complex64::from_polar(1.0, -phase)
            })
            .sum()
    }

    pub fn same_lattice_space(&self, other: &SpectralField) -> bool {
        self.n == other.n && self.period == other.period
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = FieldJson {
            n: Some(self.n),
            period: self.period,
            modes: self
                .modes
                .iter()
                .map(|(k, c)| ModeJson {
                    k: k.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        serde_json::to_value(j).expect("field serialises")
    }

    /// Parses `{"period": L, "modes": [{"k": [..], "re": r, "im": i}]}`; an
    /// optional `"n"` is required only when the mode list is empty.
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let j: FieldJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Config(format!("spectral field: {e}")))?;
        let n = match (j.n, j.modes.first()) {
            (Some(n), _) => n,
            (None, Some(m)) => m.k.len(),
            (None, None) => {
                return Err(Error::Config(
                    "spectral field without modes needs \"n\"".into(),
                ))
            }
        };
        let mut f = Self::new(n, j.period).map_err(|e| Error::Config(e.to_string()))?;
        for m in j.modes {
            f.add_mode(m.k, Complex64::new(m.re, m.im))
                .map_err(|e| Error::Config(format!("spectral field: {e}")))?;
        }
        Ok(f)
    }

    /// Samples on the grid `x_j = L j / N`, `j ∈ {0..N-1}^n`, row-major with
    /// `x_1` varying slowest. Every mode must satisfy `-N/2 ≤ k_i < N/2`.
    pub fn modes_to_grid(&self, points: usize) -> Result<Vec<Complex64>> {
        check_points(points)?;
        let half = (points / 2) as i64;
        let mut data = vec![Complex64::new(0.0, 0.0); points.pow(self.n as u32)];
        for (k, c) in &self.modes {
            if k.iter().any(|&ki| ki < -half || ki >= half) {
                return Err(Error::SizeMismatch(format!(
                    "mode {k:?} is not representable on a grid of {points} points per axis"
                )));
            }
            data[flat_index(k, points)] += c;
        }
        // f_j = Σ_k c_k e^{-2πi jk/N}
        fft_nd(&mut data, self.n, points, FftDirection::Forward);
        Ok(data)
    }

    /// Inverse of [`SpectralField::modes_to_grid`]: `c_k = N^{-n} Σ_j f_j e^{+2πi jk/N}`.
    /// All `N^n` modes are kept (see [`SpectralField::pruned`]).
    pub fn grid_to_modes(
        n: usize,
        period: f64,
        points: usize,
        samples: &[Complex64],
    ) -> Result<Self> {
        check_points(points)?;
        let total = points.pow(n as u32);
        if samples.len() != total {
            return Err(Error::SizeMismatch(format!(
                "{} samples for a {n}-dimensional grid of {points} points per axis ({total} expected)",
                samples.len()
            )));
        }
        let mut data = samples.to_vec();
        fft_nd(&mut data, n, points, FftDirection::Inverse);
        let scale = 1.0 / total as f64;
        let mut f = Self::new(n, period)?;
        for (idx, c) in data.into_iter().enumerate() {
            f.modes.insert(lattice_of(idx, n, points), c * scale);
        }
        Ok(f)
    }

    /// Grid CSV with header `x1,...,xn,value` (real part of the samples).
    pub fn to_grid_csv(&self, points: usize) -> Result<String> {
        let data = self.modes_to_grid(points)?;
        let mut out = String::new();
        let header: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",value\n");
        for (idx, v) in data.iter().enumerate() {
            for x in grid_point(idx, self.n, points, self.period) {
                out.push_str(&format!("{x:.16e},"));
            }
            out.push_str(&format!("{:.16e}\n", v.re));
        }
        Ok(out)
    }

    /// Reads a grid CSV written in the layout of [`SpectralField::to_grid_csv`].
    pub fn from_grid_csv(text: &str, period: f64) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("grid CSV is empty".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let n = cols.len().saturating_sub(1);
        let expected: Vec<String> = (1..=n)
            .map(|i| format!("x{i}"))
            .chain(["value".to_string()])
            .collect();
        if n == 0 || cols != expected {
            return Err(Error::Config(format!(
                "grid CSV header must be x1,...,xn,value; got \"{header}\""
            )));
        }
        let mut values = Vec::new();
        let mut coords = Vec::new();
        for (row, line) in lines.enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("grid CSV line {}: {e}", row + 2)))?;
            if fields.len() != n + 1 {
                return Err(Error::Config(format!(
                    "grid CSV line {}: expected {} columns",
                    row + 2,
                    n + 1
                )));
            }
            coords.push(fields[..n].to_vec());
            values.push(Complex64::new(fields[n], 0.0));
        }
        let points = (values.len() as f64).powf(1.0 / n as f64).round() as usize;
        if points.pow(n as u32) != values.len() {
            return Err(Error::SizeMismatch(format!(
                "{} rows do not form an N^{n} grid",
                values.len()
            )));
        }
        for (idx, c) in coords.iter().enumerate() {
            let want = grid_point(idx, n, points, period);
            if c.iter()
                .zip(&want)
                .any(|(a, b)| (a - b).abs() > 1e-9 * period)
            {
                return Err(Error::Config(format!(
                    "grid CSV row {} has coordinates {c:?}, expected {want:?} for period {period}",
                    idx + 2
                )));
            }
        }
        Self::grid_to_modes(n, period, points, &values)
    }
}

/// `ξ_k = 2πk/L`.
pub fn frequency(k: &[i64], period: f64) -> Vec<f64> {
    k.iter().map(|&ki| 2.0 * PI * ki as f64 / period).collect()
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 || points % 2 != 0 {
        return Err(Error::SizeMismatch(format!(
            "grid size N = {points} must be even and at least 2"
        )));
    }
    Ok(())
}

fn flat_index(k: &[i64], points: usize) -> usize {
    let np = points as i64;
    k.iter()
        .fold(0, |acc, &ki| acc * points + ki.rem_euclid(np) as usize)
}

fn lattice_of(mut idx: usize, n: usize, points: usize) -> Vec<i64> {
    let half = (points / 2) as i64;
    let mut k = vec![0; n];
    for d in (0..n).rev() {
        let j = (idx % points) as i64;
        idx /= points;
        k[d] = if j >= half { j - points as i64 } else { j };
    }
    k
}

fn grid_point(mut idx: usize, n: usize, points: usize, period: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for d in (0..n).rev() {
        x[d] = period * (idx % points) as f64 / points as f64;
        idx /= points;
    }
    x
}

/// Unnormalised `n`-dimensional DFT on a row-major `points^n` array.
fn fft_nd(data: &mut [Complex64], n: usize, points: usize, dir: FftDirection) {
    let fft = FftPlanner::new().plan_fft(points, dir);
    let mut line = vec![Complex64::new(0.0, 0.0); points];
    for axis in 0..n {
        let stride = points.pow((n - 1 - axis) as u32);
        let block = stride * points;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + offset + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[start + offset + i * stride] = *v;
                }
            }
        }
    }
}

/// Multiplies every amplitude by `A(ξ_k)`.
pub fn apply_operator(sym: &PolySymbol, f: &SpectralField) -> Result<SpectralField> {
    if sym.dim() != f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            got: sym.dim(),
        });
    }
    let modes = f
        .modes
        .iter()
        .map(|(k, c)| (k.clone(), c * sym.eval_unchecked(&f.frequency(k))))
        .collect();
    Ok(SpectralField {
        n: f.n,
        period: f.period,
        modes,
    })
}

/// Discrete `L_2^τ` norm `((L/2π)^n Σ_k (1+|ξ_k|²)^τ |c_k|²)^{1/2}`.
///
/// The factor `(L/2π)^n` makes the sum a Riemann sum of the continuum
/// frequency integral; at `τ = 0` the value is the `L²` norm over one period
/// divided by `(2π)^{n/2}`.
pub fn sobolev_norm(f: &SpectralField, tau: f64) -> f64 {
    let norm_const = (f.period / (2.0 * PI)).powi(f.n as i32);
    let sum: f64 = f
        .modes
        .iter()
        .map(|(k, c)| {
            let xi2: f64 = f.frequency(k).iter().map(|x| x * x).sum();
            (1.0 + xi2).powf(tau) * c.norm_sqr()
        })
        .sum();
    (norm_const * sum).sqrt()
}
