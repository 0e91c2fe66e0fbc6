//! Numerical probes of the classical Mittag-Leffler estimates and of the
//! Laplace pair of the kernel.

use super::{mittag_leffler, ml_kernel, MLKernelSpec};
use crate::error::{Error, Result};
use crate::frac_calculus::quadrature::{integrate_left_singular, integrate_smooth};

/// `max_t (1 + t) E_β(-t)` over the samples.
pub fn ml_bound_probe(beta: f64, t_samples: &[f64]) -> Result<f64> {
    if t_samples.is_empty() {
        return Err(Error::domain("ml_bound_probe needs at least one sample"));
    }
    let mut best = f64::NEG_INFINITY;
    for &t in t_samples {
        if t < 0.0 {
            return Err(Error::domain(format!("sample t = {t} must be >= 0")));
        }
        best = best.max((1.0 + t) * mittag_leffler(beta, 1.0, -t)?);
    }
    Ok(best)
}

/// `max_t  t^{β-1} E_{β,β}(-λ t^β) / (λ^{ε-1} t^{εβ-1})` over positive samples.
pub fn lemma2_ratio_probe(beta: f64, lambda: f64, eps: f64, t_samples: &[f64]) -> Result<f64> {
    if !(lambda > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(
            "lemma-2 probe needs lambda > 0 and eps in (0, 1)",
        ));
    }
    let spec = MLKernelSpec::new(beta, lambda)?;
    let mut best = f64::NEG_INFINITY;
    for &t in t_samples {
        let k = ml_kernel(spec, t)?;
        let bound = lambda.powf(eps - 1.0) * t.powf(eps * beta - 1.0);
        best = best.max(k.abs() / bound);
    }
    Ok(best)
}

/// Checks that `t ↦ E_β(-t)` is positive and strictly decreasing on a
/// logarithmic grid of `n` points in `[t_min, t_max]`.
pub fn monotone_on_log_grid(beta: f64, t_min: f64, t_max: f64, n: usize) -> Result<bool> {
    let mut prev = mittag_leffler(beta, 1.0, 0.0)?;
    let ratio = (t_max / t_min).ln() / (n - 1) as f64;
    for i in 0..n {
        let t = t_min * (ratio * i as f64).exp();
        let v = mittag_leffler(beta, 1.0, -t)?;
        if !(v > 0.0 && v < prev) {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}

/// `∫_0^∞ e^{-st} t^{β-1} E_{β,β}(-λ t^β) dt` by time-domain quadrature.
///
/// The first panel `[0, a_0]` carries the weight `t^{β-1}` in a Gauss-Jacobi
/// rule; beyond it panels grow geometrically (ratio 2) up to the point where
/// `e^{-st}` drops below `1e-18`.
pub fn laplace_transform_kernel(spec: MLKernelSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain(format!(
            "Laplace variable s = {s} must be > 0"
        )));
    }
    const NODES: usize = 32;
    let spec = MLKernelSpec::new(spec.beta, spec.lambda)?;
    let a0 = 1e-16f64;
    let t_max = 42.0 / s;
    let mut total = integrate_left_singular(
        |t| (-s * t).exp() * spec.kernel_regular_part(t),
        0.0,
        a0,
        spec.beta - 1.0,
        NODES,
    );
    let mut a = a0;
    while a < t_max {
        let b = (2.0 * a).min(t_max);
        total += integrate_smooth(|t| (-s * t).exp() * spec.kernel_unchecked(t), a, b, NODES);
        a = b;
    }
    if !total.is_finite() {
        return Err(Error::domain("non-finite Laplace integral"));
    }
    Ok(total)
}
