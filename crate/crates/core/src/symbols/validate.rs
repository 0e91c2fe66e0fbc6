use super::system::TriangularSystem;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

/// Quasi-uniform points on the unit sphere of `ℝ^n`, always including the
/// coordinate axes `±e_i`.
///
/// `n = 1` gives `±1`; `n = 2` equispaced angles; `n = 3` a Fibonacci
/// lattice; higher dimensions normalise Halton points pushed through the
/// Gaussian quantile (Box-Muller).
pub fn sphere_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            pts.push(e);
        }
    }
    match n {
        0 | 1 => {}
        2 => {
            for k in 0..count {
                let th = 2.0 * PI * (k as f64 + 0.5) / count as f64;
                pts.push(vec![th.cos(), th.sin()]);
            }
        }
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            for k in 0..count {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let th = golden * k as f64;
                pts.push(vec![r * th.cos(), th.sin() * r, z]);
            }
        }
        _ => {
            let primes = first_primes(2 * n);
            for k in 1..=count {
                let mut v = Vec::with_capacity(n);
                for d in 0..n {
                    let u1 = radical_inverse(k, primes[2 * d]).max(1e-300);
                    let u2 = radical_inverse(k, primes[2 * d + 1]);
                    v.push((-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos());
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    pts.push(v.into_iter().map(|x| x / norm).collect());
                }
            }
        }
    }
    pts
}

fn radical_inverse(mut k: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while k > 0 {
        r += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    r
}

fn first_primes(count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2;
    while out.len() < count {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// One failed condition; indices are one-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `ℓ_{jj} > ℓ_{ij}` fails for a stored coupling.
    OrderCondition {
        i: usize,
        j: usize,
        diagonal_order: u32,
        entry_order: u32,
    },
    NotHomogeneous {
        j: usize,
    },
    NotElliptic {
        j: usize,
        sampled_min: f64,
    },
    BetaRange {
        j: usize,
        beta: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderCondition { i, j, diagonal_order, entry_order } => write!(
                f,
                "column {j} violates l_{j}{j} > l_{i}{j} ({diagonal_order} is not greater than {entry_order})"
            ),
            Violation::NotHomogeneous { j } => write!(f, "diagonal entry A_{j}{j} is not homogeneous"),
            Violation::NotElliptic { j, sampled_min } => write!(
                f,
                "diagonal entry A_{j}{j} is not elliptic (minimum {sampled_min:.6e} on the unit sphere)"
            ),
            Violation::BetaRange { j, beta } => write!(f, "beta_{j} = {beta} is outside the allowed range (0,1]"),
        }
    }
}

/// Outcome of [`validate_system`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub m: usize,
    pub n: usize,
    pub p_star: u32,
    pub q: Vec<u32>,
    /// Sampled `min_{|ξ|=1} A_{jj}(ξ)` per diagonal entry.
    pub ellipticity_min: Vec<f64>,
    pub homogeneous: Vec<bool>,
    pub violations: Vec<Violation>,
}

/// Checks the order condition, homogeneity and ellipticity of the diagonal,
/// and the order range. Ellipticity is estimated on `sphere_samples`
/// quasi-uniform points.
pub fn validate_system(sys: &TriangularSystem, sphere_samples: usize) -> ValidationReport {
    let m = sys.m();
    let mut violations = Vec::new();
    for (j, &b) in sys.betas().as_slice().iter().enumerate() {
        if !(b > 0.0 && b <= 1.0) {
            violations.push(Violation::BetaRange { j: j + 1, beta: b });
        }
    }
    for j in 0..m {
        let lj = sys.order(j, j);
        for i in j + 1..m {
            let e = sys.entry(i, j).expect("lower entry");
            // absent couplings make the condition vacuous
            if !e.is_zero() && e.order() >= lj {
                violations.push(Violation::OrderCondition {
                    i: i + 1,
                    j: j + 1,
                    diagonal_order: lj,
                    entry_order: e.order(),
                });
            }
        }
    }
    let pts = sphere_points(sys.n(), sphere_samples);
    let mut homogeneous = Vec::with_capacity(m);
    let mut ellipticity_min = Vec::with_capacity(m);
    for j in 0..m {
        let d = sys.entry(j, j).expect("diagonal entry");
        let hom = !d.is_zero() && d.is_homogeneous();
        if !hom {
            violations.push(Violation::NotHomogeneous { j: j + 1 });
        }
        let min = pts
            .iter()
            .map(|x| d.eval_unchecked(x))
            .fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            violations.push(Violation::NotElliptic {
                j: j + 1,
                sampled_min: min,
            });
        }
        homogeneous.push(hom);
        ellipticity_min.push(min);
    }
    ValidationReport {
        valid: violations.is_empty(),
        m,
        n: sys.n(),
        p_star: sys.p_star(),
        q: sys.q().to_vec(),
        ellipticity_min,
        homogeneous,
        violations,
    }
}

/// `(p*, [q_1, …, q_m])`.
pub fn p_star_and_q(sys: &TriangularSystem) -> (u32, Vec<u32>) {
    (sys.p_star(), sys.q().to_vec())
}

/// Sampled Petrovsky constant `min_{|ξ|=1} min_{|μ|=1} Re (A(ξ)μ, μ)`.
///
/// For real `A(ξ)` the inner minimum over complex unit vectors is the least
/// eigenvalue of the symmetric part `(A + Aᵀ)/2`, so it is computed exactly
/// and only `ξ` is sampled.
pub fn petrovsky_probe(sys: &TriangularSystem, xi_samples: usize) -> f64 {
    sphere_points(sys.n(), xi_samples)
        .iter()
        .map(|xi| {
            let a = sys.matrix_unchecked(xi);
            let sym = (&a + a.transpose()) * 0.5;
            sym.symmetric_eigenvalues().min()
        })
        .fold(f64::INFINITY, f64::min)
}
