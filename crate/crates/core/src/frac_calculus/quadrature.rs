//! Gauss-Legendre and Gauss-Jacobi rules with algebraic endpoint weights.
//!
//! Rules are generated once per `(nodes, α, β)` and cached behind a mutex;
//! cached rules are immutable.

use gauss_quad::{GaussJacobi, GaussLegendre};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]` for the weight `(1-x)^α (1+x)^β`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

type Key = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached rule with `n ≥ 2` nodes; exponents must exceed `-1`.
pub fn rule(n: usize, alpha: f64, beta: f64) -> Arc<GaussRule> {
    assert!(
        alpha > -1.0 && beta > -1.0,
        "Jacobi exponents must exceed -1"
    );
    // exponents of exactly zero are normalised so that -0.0 and 0.0 share a slot
    let (alpha, beta) = (alpha + 0.0, beta + 0.0);
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let pairs = if alpha == 0.0 && beta == 0.0 {
        GaussLegendre::new(n)
            .expect("Gauss-Legendre needs at least 2 nodes")
            .into_node_weight_pairs()
    } else {
        GaussJacobi::new(n, alpha, beta)
            .expect("valid Gauss-Jacobi parameters")
            .into_node_weight_pairs()
    };
    let (nodes, weights) = pairs.into_iter().unzip();
    let r = Arc::new(GaussRule {
        nodes,
        weights,
        alpha,
        beta,
    });
    cache().lock().unwrap().entry(key).or_insert(r).clone()
}

/// `∫_a^b f`.
pub fn integrate_smooth<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let r = rule(n, 0.0, 0.0);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    half * r
        .nodes
        .iter()
        .zip(&r.weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// `∫_a^b (τ - a)^e f(τ) dτ` with `e > -1`.
pub fn integrate_left_singular<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, e: f64, n: usize) -> f64 {
    // (1 + x) = 2(τ - a)/(b - a)
    let r = rule(n, 0.0, e);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    half.powf(e + 1.0)
        * r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
}

/// `∫_a^b (b - τ)^e f(τ) dτ` with `e > -1`.
pub fn integrate_right_singular<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, e: f64, n: usize) -> f64 {
    let r = rule(n, e, 0.0);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    half.powf(e + 1.0)
        * r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
}

/// Mapped nodes and weights for `∫_a^b (τ-a)^{ea} (b-τ)^{eb} f(τ) dτ`.
pub fn mapped(n: usize, a: f64, b: f64, ea: f64, eb: f64) -> impl Iterator<Item = (f64, f64)> {
    let r = rule(n, eb, ea);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let scale = half.powf(ea + eb + 1.0);
    (0..r.nodes.len()).map(move |i| (mid + half * r.nodes[i], scale * r.weights[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_endpoint_power_laws_exactly() {
        // ∫_0^1 τ^{-0.9} dτ = 10
        assert_relative_eq!(
            integrate_left_singular(|_| 1.0, 0.0, 1.0, -0.9, 16),
            10.0,
            max_relative = 1e-12
        );
        // ∫_0^4 (4-τ)^{-1/2} dτ = 4
        assert_relative_eq!(
            integrate_right_singular(|_| 1.0, 0.0, 4.0, -0.5, 16),
            4.0,
            max_relative = 1e-12
        );
        // ∫_0^1 τ^{-1/2} τ^3 dτ = 2/7
        assert_relative_eq!(
            integrate_left_singular(|t| t.powi(3), 0.0, 1.0, -0.5, 8),
            2.0 / 7.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            integrate_smooth(|t| t.exp(), 0.0, 1.0, 16),
            std::f64::consts::E - 1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn rules_are_shared_across_calls() {
        let a = rule(12, -0.3, 0.0);
        let b = rule(12, -0.3, 0.0);
        assert!(Arc::ptr_eq(&a, &b));
    }
}
