//! L1 Caputo derivative and product-quadrature Riemann-Liouville operators.

use super::grid::{Sample, SampledFunction};
use super::quadrature::rule;
use crate::error::{Error, Result};
use crate::mlf::gamma::{gamma, rgamma};

fn check_order(beta: f64, allow_one: bool) -> Result<()> {
    let ok = beta > 0.0 && (beta < 1.0 || (allow_one && beta == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "fractional order beta = {beta} outside the admissible range"
        )))
    }
}

// Beyond this ratio a/Δ the closed-form moments lose too many digits to
// cancellation and a short Gauss-Legendre rule is used instead.
const CLOSED_FORM_RATIO: f64 = 16.0;

/// `(∫_0^1 (a+Δv)^p dv, ∫_0^1 (a+Δv)^p (1-v) dv)` for `a ≥ 0`, `Δ > 0`.
fn power_moments(a: f64, delta: f64, p: f64) -> (f64, f64) {
    if a <= CLOSED_FORM_RATIO * delta {
        let b = a + delta;
        let d1 = b.powf(p + 1.0) - a.powf(p + 1.0);
        let d2 = b.powf(p + 2.0) - a.powf(p + 2.0);
        let m0 = d1 / ((p + 1.0) * delta);
        let m1 = (b * d1 / (p + 1.0) - d2 / (p + 2.0)) / (delta * delta);
        (m0, m1)
    } else {
        let r = rule(4, 0.0, 0.0);
        let (mut m0, mut m1) = (0.0, 0.0);
        for (x, w) in r.nodes.iter().zip(&r.weights) {
            let v = 0.5 * (x + 1.0);
            let g = 0.5 * w * (a + delta * v).powf(p);
            m0 += g;
            m1 += g * (1.0 - v);
        }
        (m0, m1)
    }
}

/// L1 approximation of the Caputo derivative `D^β f` at every node.
///
/// The value at `t_0` is undefined and reported as NaN. For `β = 1` this is
/// the backward difference.
pub fn caputo_l1<T: Sample>(f: &SampledFunction<T>, beta: f64) -> Result<SampledFunction<T>> {
    check_order(beta, true)?;
    let t = f.grid.nodes();
    if t.len() < 3 {
        return Err(Error::GridTooShort {
            needed: 3,
            got: t.len(),
        });
    }
    let v = &f.values;
    let mut out = Vec::with_capacity(t.len());
    out.push(T::nan());
    if beta == 1.0 {
        for n in 1..t.len() {
            out.push((v[n] - v[n - 1]) * (1.0 / (t[n] - t[n - 1])));
        }
    } else {
        // (t_n - t_{k-1})^{1-β} - (t_n - t_k)^{1-β} = (1-β) Δ_k ∫_0^1 (a + Δ_k v)^{-β} dv
        let scale = rgamma(1.0 - beta);
        for n in 1..t.len() {
            let mut acc = T::zero();
            for k in 1..=n {
                let delta = t[k] - t[k - 1];
                let (m0, _) = power_moments(t[n] - t[k], delta, -beta);
                acc = acc + (v[k] - v[k - 1]) * m0;
            }
            out.push(acc * scale);
        }
    }
    SampledFunction::new(f.grid.clone(), out)
}

fn rl_at<T: Sample>(f: &SampledFunction<T>, beta: f64, n: usize) -> T {
    let t = f.grid.nodes();
    let v = &f.values;
    let mut acc = T::zero();
    for k in 1..=n {
        let delta = t[k] - t[k - 1];
        let (m0, m1) = power_moments(t[n] - t[k], delta, beta - 1.0);
        // v = 0 sits at t_k, v = 1 at t_{k-1}
        acc = acc + v[k] * (delta * m1) + v[k - 1] * (delta * (m0 - m1));
    }
    acc * (1.0 / gamma(beta))
}

/// `I^β f(t_n)` by product quadrature, exact for piecewise-linear `f`.
pub fn rl_integral<T: Sample>(f: &SampledFunction<T>, beta: f64, node: usize) -> Result<T> {
    check_order(beta, true)?;
    if node >= f.grid.len() {
        return Err(Error::IndexOutOfRange(format!(
            "node {node} on a grid of {} nodes",
            f.grid.len()
        )));
    }
    Ok(rl_at(f, beta, node))
}

/// `I^β f` at every node.
pub fn rl_integral_all<T: Sample>(f: &SampledFunction<T>, beta: f64) -> Result<SampledFunction<T>> {
    check_order(beta, true)?;
    let values = (0..f.grid.len()).map(|n| rl_at(f, beta, n)).collect();
    SampledFunction::new(f.grid.clone(), values)
}

/// Riemann-Liouville derivative `d/dt I^{1-β} f` at an interior node, by a
/// three-point difference on the (possibly nonuniform) grid.
pub fn rl_derivative<T: Sample>(f: &SampledFunction<T>, beta: f64, node: usize) -> Result<T> {
    check_order(beta, true)?;
    let t = f.grid.nodes();
    if node == 0 || node + 1 >= t.len() {
        return Err(Error::IndexOutOfRange(format!(
            "node {node} needs a neighbour on both sides (grid has {} nodes)",
            t.len()
        )));
    }
    let y = |k: usize| {
        if beta == 1.0 {
            f.values[k]
        } else {
            rl_at(f, 1.0 - beta, k)
        }
    };
    let h1 = t[node] - t[node - 1];
    let h2 = t[node + 1] - t[node];
    Ok(y(node - 1) * (-h2 / (h1 * (h1 + h2)))
        + y(node) * ((h2 - h1) / (h1 * h2))
        + y(node + 1) * (h1 / (h2 * (h1 + h2))))
}
