use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Values that can be sampled on a time grid: reals or complex amplitudes.
pub trait Sample:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync + 'static
{
    fn zero() -> Self;
    fn nan() -> Self;
    fn magnitude(&self) -> f64;
}

impl Sample for f64 {
    fn zero() -> Self {
        0.0
    }
    fn nan() -> Self {
        f64::NAN
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Sample for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn nan() -> Self {
        Complex64::new(f64::NAN, f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Strictly increasing time nodes `0 = t_0 < t_1 < … < t_N = T`, `N ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    grading: f64,
}

impl TimeGrid {
    /// `t_i = T (i/N)^r` for `i = 0..=N`.
    pub fn graded(t_end: f64, intervals: usize, grading: f64) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::GridTooShort {
                needed: 3,
                got: intervals + 1,
            });
        }
        if !(t_end > 0.0) || !(grading >= 1.0) {
            return Err(Error::domain(format!(
                "graded grid needs T > 0 and r >= 1 (got T = {t_end}, r = {grading})"
            )));
        }
        let n = intervals as f64;
        let nodes = (0..=intervals)
            .map(|i| {
                if i == intervals {
                    t_end
                } else {
                    t_end * (i as f64 / n).powf(grading)
                }
            })
            .collect::<Vec<_>>();
        let g = TimeGrid { nodes, grading };
        g.check()?;
        Ok(g)
    }

    pub fn uniform(t_end: f64, intervals: usize) -> Result<Self> {
        Self::graded(t_end, intervals, 1.0)
    }

    /// Grid from explicit nodes; the grading exponent is recorded as 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let g = TimeGrid {
            nodes,
            grading: 1.0,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if self.nodes.len() < 3 {
            return Err(Error::GridTooShort {
                needed: 3,
                got: self.nodes.len(),
            });
        }
        if self.nodes[0] != 0.0 {
            return Err(Error::domain("time grid must start at t = 0"));
        }
        if self.nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("time grid nodes must be strictly increasing"));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// Index of the interval `[t_i, t_{i+1}]` that contains `t`.
    pub fn locate(&self, t: f64) -> usize {
        match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.nodes.len() - 2),
        }
    }
}

/// Grading exponent `max(2, 2/β_min)` used for fractional problems.
pub fn default_grading(beta_min: f64) -> f64 {
    (2.0 / beta_min).max(2.0)
}

/// Values aligned with the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T: Sample = f64> {
    pub grid: TimeGrid,
    pub values: Vec<T>,
}

impl<T: Sample> SampledFunction<T> {
    pub fn new(grid: TimeGrid, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::SizeMismatch(format!(
                "{} grid nodes but {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> T) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        SampledFunction { grid, values }
    }

    /// Piecewise-linear interpolation; constant extrapolation outside `[0, T]`.
    pub fn interpolate(&self, t: f64) -> T {
        let nodes = self.grid.nodes();
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= self.grid.t_end() {
            return *self.values.last().unwrap();
        }
        let i = self.grid.locate(t);
        let (a, b) = (nodes[i], nodes[i + 1]);
        let w = (t - a) / (b - a);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}
