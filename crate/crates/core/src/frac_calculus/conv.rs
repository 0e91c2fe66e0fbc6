//! Convolutions of kernels with algebraic singularities at `τ = 0`.

use super::quadrature::mapped;
use crate::error::{Error, Result};
use crate::mlf::MLKernelSpec;
use std::cell::RefCell;

/// Gauss nodes per panel.
pub const PANEL_NODES: usize = 32;
/// Library default absolute tolerance per convolution level.
pub const DEFAULT_CONV_TOL: f64 = 1e-8;
const MAX_LEVELS: usize = 240;
const LEVEL_STEP: usize = 4;

fn check_exponent(e: f64) -> Result<()> {
    if e > -1.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "endpoint exponent {e} must exceed -1"
        )))
    }
}

/// One half of `[0, t]` seen from its singular end: geometric panels
/// `[h/2^{l+1}, h/2^l]` are accumulated incrementally, and the remaining
/// `[0, h/2^L]` is covered by a Gauss-Jacobi panel carrying `d^exponent`.
/// `k_sing(d)` is evaluated at distance `d` from the end, `other(d)` is the
/// factor that is smooth there.
struct GradedHalf<'a> {
    k_sing: &'a dyn Fn(f64) -> f64,
    exponent: f64,
    other: &'a dyn Fn(f64) -> f64,
    nodes: usize,
    panel_sum: f64,
    hi: f64,
}

impl GradedHalf<'_> {
    fn add_panels(&mut self, count: usize) {
        for _ in 0..count {
            let lo = 0.5 * self.hi;
            self.panel_sum += mapped(self.nodes, lo, self.hi, 0.0, 0.0)
                .map(|(d, w)| w * (self.k_sing)(d) * (self.other)(d))
                .sum::<f64>();
            self.hi = lo;
        }
    }

    fn innermost(&self, nodes: usize) -> f64 {
        mapped(nodes, 0.0, self.hi, self.exponent, 0.0)
            .map(|(d, w)| w * (self.k_sing)(d) / d.powf(self.exponent) * (self.other)(d))
            .sum::<f64>()
    }

    fn total(&self) -> f64 {
        self.panel_sum + self.innermost(self.nodes)
    }
}

fn conv_at_level(
    ka: &dyn Fn(f64) -> f64,
    a: f64,
    kb: &dyn Fn(f64) -> f64,
    b: f64,
    t: f64,
    levels: usize,
    nodes: usize,
) -> f64 {
    let kb_far = |d: f64| kb(t - d);
    let ka_far = |d: f64| ka(t - d);
    let mut left = GradedHalf {
        k_sing: ka,
        exponent: a,
        other: &kb_far,
        nodes,
        panel_sum: 0.0,
        hi: 0.5 * t,
    };
    let mut right = GradedHalf {
        k_sing: kb,
        exponent: b,
        other: &ka_far,
        nodes,
        panel_sum: 0.0,
        hi: 0.5 * t,
    };
    left.add_panels(levels);
    right.add_panels(levels);
    left.total() + right.total()
}

/// `∫_0^t kA(τ) kB(t-τ) dτ` to absolute tolerance `tol`.
///
/// `kA(τ) ~ τ^{a}` and `kB(τ) ~ τ^{b}` near zero. The interval is split at
/// `t/2`; each half uses a Gauss-Jacobi panel at its singular end and
/// geometrically graded Gauss-Legendre panels elsewhere, adding panels
/// until two successive estimates agree to `tol`; a lower-order rule on the
/// final panels must agree as well.
pub fn conv_singular<A, B>(ka: A, a: f64, kb: B, b: f64, t: f64, tol: f64) -> Result<f64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    conv_singular_with(ka, a, kb, b, t, tol, PANEL_NODES)
}

/// [`conv_singular`] with an explicit number of Gauss nodes per panel.
pub fn conv_singular_with<A, B>(
    ka: A,
    a: f64,
    kb: B,
    b: f64,
    t: f64,
    tol: f64,
    nodes: usize,
) -> Result<f64>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    check_exponent(a)?;
    check_exponent(b)?;
    if !(t > 0.0) || !(tol > 0.0) {
        return Err(Error::domain(format!(
            "convolution needs t > 0 and tol > 0 (t = {t}, tol = {tol})"
        )));
    }
    // Two estimates must agree: successive grading levels, and the final
    // panels under a lower-order rule (which catches interior trouble).
    // Near-endpoint corrections like τ^{a+β} converge only algebraically in
    // the innermost width, hence the long, incremental level schedule.
    let coarse_nodes = (3 * nodes / 4).max(2);
    let kb_far = |d: f64| kb(t - d);
    let ka_far = |d: f64| ka(t - d);
    let mut left = GradedHalf {
        k_sing: &ka,
        exponent: a,
        other: &kb_far,
        nodes,
        panel_sum: 0.0,
        hi: 0.5 * t,
    };
    let mut right = GradedHalf {
        k_sing: &kb,
        exponent: b,
        other: &ka_far,
        nodes,
        panel_sum: 0.0,
        hi: 0.5 * t,
    };
    let mut prev = left.total() + right.total();
    let mut levels = 0;
    let mut err = f64::INFINITY;
    while levels < MAX_LEVELS {
        left.add_panels(LEVEL_STEP);
        right.add_panels(LEVEL_STEP);
        levels += LEVEL_STEP;
        let cur = left.total() + right.total();
        let grading_err = (cur - prev).abs();
        err = grading_err;
        if grading_err <= tol {
            let coarse = conv_at_level(&ka, a, &kb, b, t, levels, coarse_nodes);
            err = grading_err.max((cur - coarse).abs());
            if err <= tol {
                return Ok(cur);
            }
        }
        prev = cur;
    }
    Err(Error::Tolerance {
        context: format!("singular convolution at t = {t}"),
        achieved: err,
        tol,
    })
}

fn head_value(head: &MLKernelSpec, one_param: bool, t: f64) -> f64 {
    if one_param {
        head.relaxation_unchecked(t)
    } else {
        head.kernel_unchecked(t)
    }
}

fn chain_rec(
    specs: &[MLKernelSpec],
    head: &MLKernelSpec,
    one_param: bool,
    t: f64,
    tol: f64,
    failure: &RefCell<Option<Error>>,
) -> f64 {
    let Some((last, rest)) = specs.split_last() else {
        return head_value(head, one_param, t);
    };
    if t == 0.0 {
        return 0.0;
    }
    // leading exponent of head ∗ k_1 ∗ … ∗ k_{p-1}
    let head_exp = if one_param { 0.0 } else { head.beta - 1.0 };
    let inner_exp = head_exp + rest.iter().map(|s| s.beta).sum::<f64>();
    let inner = |tau: f64| chain_rec(rest, head, one_param, tau, tol, failure);
    let kernel = |tau: f64| last.kernel_unchecked(tau);
    match conv_singular(inner, inner_exp, kernel, last.beta - 1.0, t, tol) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    }
}

/// Nested convolution `(head ∗ k_1 ∗ … ∗ k_p)(t)`.
///
/// The head is `E_β(-λ t^β)` when `head_one_param`, otherwise the kernel
/// `t^{β-1} E_{β,β}(-λ t^β)`; each `k_i` is the kernel of `specs[i]`. Each
/// level is evaluated by [`conv_singular`] with tolerance `tol / p`. The
/// cost grows like `(panel nodes)^p`.
pub fn conv_chain(
    specs: &[MLKernelSpec],
    head_one_param: bool,
    head_spec: &MLKernelSpec,
    t: f64,
    tol: f64,
) -> Result<f64> {
    for s in specs.iter().chain(std::iter::once(head_spec)) {
        MLKernelSpec::new(s.beta, s.lambda)?;
    }
    if !(t > 0.0) || !(tol > 0.0) {
        return Err(Error::domain(format!(
            "chain needs t > 0 and tol > 0 (t = {t}, tol = {tol})"
        )));
    }
    let level_tol = tol / specs.len().max(1) as f64;
    let failure = RefCell::new(None);
    let v = chain_rec(specs, head_spec, head_one_param, t, level_tol, &failure);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
