use crate::error::{Error, Result};
use crate::frac_calculus::{default_grading, TimeGrid};
use crate::mlf::gamma::gamma;
use crate::symbols::TriangularSystem;
use num_complex::Complex64;

/// Oracle trajectory on its own time mesh.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub grid: TimeGrid,
    /// `values[node][component]`.
    pub values: Vec<Vec<Complex64>>,
}

impl OracleSolution {
    /// Linear interpolation between mesh nodes.
    pub fn at(&self, t: f64) -> Vec<Complex64> {
        let nodes = self.grid.nodes();
        if t >= self.grid.t_end() {
            return self.values[nodes.len() - 1].clone();
        }
        let i = self.grid.locate(t);
        let w = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
        self.values[i]
            .iter()
            .zip(&self.values[i + 1])
            .map(|(a, b)| a * (1.0 - w) + b * w)
            .collect()
    }

    pub fn last(&self) -> &[Complex64] {
        self.values.last().expect("oracle has nodes")
    }
}

/// Initial value and forcing for one oracle run.
pub type OracleCase<'a> = (&'a [Complex64], &'a dyn Fn(f64) -> Vec<Complex64>);

/// Time-steps `D_t^B v + A(ξ) v = ĥ(t)`, `v(0) = φ̂`, on `[0, T]`.
///
/// Each fractional component uses the L1 scheme on a graded mesh; order-one
/// components use the trapezoidal rule. Components are solved one after the
/// other over the whole mesh, each seeing the already computed lower-index
/// components as forcing.
pub fn ode_oracle(
    sys: &TriangularSystem,
    xi: &[f64],
    phi_hat: &[Complex64],
    h_hat: &dyn Fn(f64) -> Vec<Complex64>,
    t_end: f64,
    steps: usize,
) -> Result<OracleSolution> {
    Ok(ode_oracle_many(sys, xi, &[(phi_hat, h_hat)], t_end, steps)?.remove(0))
}

/// [`ode_oracle`] for several data sets at one frequency. The L1 weights
/// depend only on the mesh, so they are computed once for all cases.
pub fn ode_oracle_many(
    sys: &TriangularSystem,
    xi: &[f64],
    cases: &[OracleCase],
    t_end: f64,
    steps: usize,
) -> Result<Vec<OracleSolution>> {
    let m = sys.m();
    if let Some((phi, _)) = cases.iter().find(|(phi, _)| phi.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: phi.len(),
        });
    }
    if steps < 16 {
        return Err(Error::GridTooShort {
            needed: 17,
            got: steps + 1,
        });
    }
    if !(t_end > 0.0) {
        return Err(Error::domain(format!(
            "oracle horizon T = {t_end} must be > 0"
        )));
    }
    let a = sys.matrix(xi)?;
    let beta_min = sys.betas().min();
    let grid = if beta_min < 1.0 {
        TimeGrid::graded(t_end, steps, default_grading(beta_min))?
    } else {
        TimeGrid::uniform(t_end, steps)?
    };
    let t = grid.nodes().to_vec();
    let nc = cases.len();
    let mut forcing: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(nc);
    for (_, h) in cases {
        let f: Vec<Vec<Complex64>> = t.iter().map(|&s| h(s)).collect();
        if let Some(bad) = f.iter().find(|f| f.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: bad.len(),
            });
        }
        forcing.push(f);
    }

    let zero = Complex64::new(0.0, 0.0);
    // cols[case][component][node]
    let mut cols: Vec<Vec<Vec<Complex64>>> = vec![Vec::with_capacity(m); nc];
    for k in 0..m {
        let beta = sys.betas()[k];
        let lambda = a[(k, k)];
        let rhs: Vec<Vec<Complex64>> = (0..nc)
            .map(|c| {
                (0..t.len())
                    .map(|n| {
                        forcing[c][n][k]
                            - (0..k).map(|j| cols[c][j][n] * a[(k, j)]).sum::<Complex64>()
                    })
                    .collect()
            })
            .collect();
        let mut v: Vec<Vec<Complex64>> = cases
            .iter()
            .map(|(phi, _)| {
                let mut v = vec![zero; t.len()];
                v[0] = phi[k];
                v
            })
            .collect();
        if beta == 1.0 {
            for c in 0..nc {
                for n in 1..t.len() {
                    let dt = t[n] - t[n - 1];
                    v[c][n] = (v[c][n - 1] * (1.0 / dt - 0.5 * lambda)
                        + (rhs[c][n] + rhs[c][n - 1]) * 0.5)
                        / (1.0 / dt + 0.5 * lambda);
                }
            }
        } else {
            let g = 1.0 / gamma(2.0 - beta);
            let e = 1.0 - beta;
            let mut diff = vec![vec![zero; t.len()]; nc];
            let mut hist = vec![zero; nc];
            for n in 1..t.len() {
                hist.fill(zero);
                let mut prev = t[n].powf(e);
                for i in 1..n {
                    let (gap, dt) = (t[n] - t[i - 1], t[i] - t[i - 1]);
                    let x = dt / gap;
                    // prev - next with next = (gap - dt)^e; on strongly graded
                    // meshes x reaches 1e-50 and the plain difference is 0
                    let (drop, next) = if x < 1e-6 {
                        let drop = prev * e * x * (1.0 + 0.5 * (1.0 - e) * x);
                        (drop, prev - drop)
                    } else if x < 1e-3 {
                        let drop = -prev * (e * (-x).ln_1p()).exp_m1();
                        (drop, prev - drop)
                    } else {
                        let next = (t[n] - t[i]).powf(e);
                        (prev - next, next)
                    };
                    let w = drop / dt;
                    for c in 0..nc {
                        hist[c] += diff[c][i] * w;
                    }
                    prev = next;
                }
                let ann = g * (t[n] - t[n - 1]).powf(-beta);
                for c in 0..nc {
                    v[c][n] = (rhs[c][n] - hist[c] * g + v[c][n - 1] * ann) / (ann + lambda);
                    diff[c][n] = v[c][n] - v[c][n - 1];
                }
            }
        }
        for (c, vc) in v.into_iter().enumerate() {
            cols[c].push(vc);
        }
    }
    Ok(cols
        .into_iter()
        .map(|cc| OracleSolution {
            grid: grid.clone(),
            values: (0..t.len())
                .map(|n| cc.iter().map(|col| col[n]).collect())
                .collect(),
        })
        .collect())
}
