use super::paths::{diagonal_values, propagator_terms, PropagatorTerm};
use crate::error::{Error, Result};
use crate::frac_calculus::conv_chain;
use crate::mlf::contour::{Contour, DEFAULT_NODES};
use crate::mlf::MLKernelSpec;
use crate::symbols::TriangularSystem;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Smallest tolerance the contour evaluation can honour.
pub const CONTOUR_ACCURACY: f64 = 1e-12;

/// The propagator symbols `S(t, ξ)` and `S′(η, ξ)` of a system at one fixed
/// frequency.
///
/// Off-diagonal entries are sums over decreasing paths of signed coefficient
/// products times a nested convolution of Mittag-Leffler kernels. Each
/// convolution chain is evaluated through its Laplace transform, the product
/// `ĥead(s) Π 1/(s^{β_τ} + λ_τ)`, inverted on a parabolic contour; diagonal
/// entries are plain Mittag-Leffler values.
#[derive(Debug, Clone)]
pub struct Propagator {
    m: usize,
    betas: Vec<f64>,
    lambdas: Vec<f64>,
    // strictly lower entries, packed row-major: (k, j) ↦ k(k-1)/2 + j
    terms: Vec<Vec<PropagatorTerm>>,
    nodes: usize,
}

fn strict_packed(k: usize, j: usize) -> usize {
    k * (k - 1) / 2 + j
}

/// Which head the inverse transform carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    /// `E_{β_j}(-λ_j t^{β_j})`, used by `S`.
    Relaxation,
    /// `t^{β_j-1} E_{β_j,β_j}(-λ_j t^{β_j})`, used by `S′`.
    Kernel,
}

impl Propagator {
    pub fn new(sys: &TriangularSystem, xi: &[f64]) -> Result<Self> {
        if xi.len() != sys.n() {
            return Err(Error::DimensionMismatch {
                expected: sys.n(),
                got: xi.len(),
            });
        }
        let m = sys.m();
        let lambdas = diagonal_values(sys, xi)?;
        let mut terms = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
        for k in 1..m {
            for j in 0..k {
                terms.push(propagator_terms(sys, k, j, xi)?);
            }
        }
        Ok(Propagator {
            m,
            betas: sys.betas().as_slice().to_vec(),
            lambdas,
            terms,
            nodes: DEFAULT_NODES,
        })
    }

    /// Overrides the number of contour nodes (default 64).
    pub fn with_contour_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `λ_j = A_{jj}(ξ)`.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Terms of the strictly lower entry `(k, j)`; empty otherwise.
    pub fn terms(&self, k: usize, j: usize) -> &[PropagatorTerm] {
        if k > j && k < self.m {
            &self.terms[strict_packed(k, j)]
        } else {
            &[]
        }
    }

    /// Number of (unpruned) path terms over all strictly lower entries.
    pub fn term_count(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    fn spec(&self, j: usize) -> MLKernelSpec {
        MLKernelSpec {
            beta: self.betas[j],
            lambda: self.lambdas[j],
        }
    }

    /// `S(t, ξ)` (lower triangular); the identity at `t = 0`.
    pub fn s_matrix(&self, t: f64) -> DMatrix<f64> {
        if t == 0.0 {
            return DMatrix::identity(self.m, self.m);
        }
        self.matrix(t, Head::Relaxation)
    }

    /// `S′(η, ξ)` for `η > 0`.
    pub fn sprime_matrix(&self, eta: f64) -> DMatrix<f64> {
        self.matrix(eta, Head::Kernel)
    }

    fn diagonal(&self, j: usize, t: f64, head: Head) -> f64 {
        match head {
            Head::Relaxation => self.spec(j).relaxation_unchecked(t),
            Head::Kernel => self.spec(j).kernel_unchecked(t),
        }
    }

    fn matrix(&self, t: f64, head: Head) -> DMatrix<f64> {
        let m = self.m;
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            out[(j, j)] = self.diagonal(j, t, head);
        }
        if m == 1 || self.terms.iter().all(Vec::is_empty) {
            return out;
        }
        let contour = Contour::new(t, self.nodes);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.terms.len()];
        let mut resolvent = vec![Complex64::new(0.0, 0.0); m];
        for (z, w) in contour.points.iter().zip(&contour.weights) {
            let ln_z = z.ln();
            for (tau, r) in resolvent.iter_mut().enumerate() {
                *r = 1.0 / ((ln_z * self.betas[tau]).exp() + self.lambdas[tau]);
            }
            for k in 1..m {
                for j in 0..k {
                    let terms = &self.terms[strict_packed(k, j)];
                    if terms.is_empty() {
                        continue;
                    }
                    let path_sum: Complex64 = terms
                        .iter()
                        .map(|term| {
                            term.path.chain_indices().fold(
                                Complex64::new(term.sign as f64 * term.coeff, 0.0),
                                |p, tau| p * resolvent[tau],
                            )
                        })
                        .sum();
                    let head_value = match head {
                        Head::Relaxation => (ln_z * (self.betas[j] - 1.0)).exp() * resolvent[j],
                        Head::Kernel => resolvent[j],
                    };
                    acc[strict_packed(k, j)] += w * head_value * path_sum;
                }
            }
        }
        for k in 1..m {
            for j in 0..k {
                out[(k, j)] = acc[strict_packed(k, j)].im;
            }
        }
        out
    }

    /// One path term `sign · coeff · (head ∗ chain)(t)` by contour inversion.
    pub fn term_value(&self, term: &PropagatorTerm, t: f64, head: Head) -> f64 {
        let scale = term.sign as f64 * term.coeff;
        if term.chain.is_empty() {
            return scale
                * match head {
                    Head::Relaxation => term.head.relaxation_unchecked(t),
                    Head::Kernel => term.head.kernel_unchecked(t),
                };
        }
        let contour = Contour::new(t, self.nodes);
        scale
            * contour.combine(contour.points.iter().map(|&z| {
                let h = match head {
                    Head::Relaxation => term.head.relaxation_transform(z),
                    Head::Kernel => term.head.resolvent(z),
                };
                term.chain.iter().fold(h, |p, s| p * s.resolvent(z))
            }))
    }

    /// The same term by nested time-domain convolution quadrature.
    pub fn term_value_time_domain(
        &self,
        term: &PropagatorTerm,
        t: f64,
        head: Head,
        tol: f64,
    ) -> Result<f64> {
        let chain = conv_chain(&term.chain, head == Head::Relaxation, &term.head, t, tol)?;
        Ok(term.sign as f64 * term.coeff * chain)
    }

    /// `S(t, ξ) φ̂`.
    pub fn apply_s(&self, t: f64, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        if phi.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: phi.len(),
            });
        }
        if t == 0.0 {
            return Ok(phi.to_vec());
        }
        let s = self.s_matrix(t);
        Ok((0..self.m)
            .map(|k| (0..=k).map(|j| phi[j] * s[(k, j)]).sum())
            .collect())
    }
}

fn check_entry(sys: &TriangularSystem, k: usize, j: usize, tol: f64) -> Result<()> {
    if k >= sys.m() || j >= sys.m() {
        return Err(Error::IndexOutOfRange(format!(
            "entry ({}, {}) in a system with m = {}",
            k + 1,
            j + 1,
            sys.m()
        )));
    }
    if tol < CONTOUR_ACCURACY {
        return Err(Error::Tolerance {
            context: "propagator entry".into(),
            achieved: CONTOUR_ACCURACY,
            tol,
        });
    }
    Ok(())
}

/// `s_{kj}(t, ξ)`; zero above the diagonal, `δ_{kj}` at `t = 0`.
pub fn s_entry(
    sys: &TriangularSystem,
    k: usize,
    j: usize,
    t: f64,
    xi: &[f64],
    tol: f64,
) -> Result<f64> {
    check_entry(sys, k, j, tol)?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time t = {t} must be >= 0")));
    }
    if k < j {
        return Ok(0.0);
    }
    Ok(Propagator::new(sys, xi)?.s_matrix(t)[(k, j)])
}

/// `s′_{kj}(η, ξ)` for `η > 0`; zero above the diagonal.
pub fn sprime_entry(
    sys: &TriangularSystem,
    k: usize,
    j: usize,
    eta: f64,
    xi: &[f64],
    tol: f64,
) -> Result<f64> {
    check_entry(sys, k, j, tol)?;
    if !(eta > 0.0) {
        return Err(Error::domain(format!("eta = {eta} must be > 0")));
    }
    if k < j {
        return Ok(0.0);
    }
    Ok(Propagator::new(sys, xi)?.sprime_matrix(eta)[(k, j)])
}

/// `S(t, ξ) φ̂(ξ)`.
pub fn apply_s(
    sys: &TriangularSystem,
    t: f64,
    phi: &[Complex64],
    xi: &[f64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    check_entry(sys, 0, 0, tol)?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time t = {t} must be >= 0")));
    }
    Propagator::new(sys, xi)?.apply_s(t, phi)
}
