use super::field::{sobolev_norm, SpectralField};
use super::forcing::ForcingField;
use crate::error::{Error, Result};
use crate::symbols::TriangularSystem;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentHypothesis {
    /// One-based component index.
    pub component: usize,
    /// `p* - ℓ_ii`.
    pub order_gap: u32,
    /// `τ + p* - ℓ_ii`.
    pub exponent: f64,
    pub phi_norm: f64,
    /// `sup_{0≤t≤T} ‖h_i(t,·)‖` in the same norm.
    pub h_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub tau: f64,
    pub n: usize,
    pub p_star: u32,
    /// `τ > n/2`.
    pub tau_condition: bool,
    pub horizon: f64,
    pub components: Vec<ComponentHypothesis>,
}

/// Exponents and norms the existence theorem asks of the data on `[0, T]`.
pub fn check_hypotheses(
    sys: &TriangularSystem,
    phi: &[SpectralField],
    h: &ForcingField,
    tau: f64,
    horizon: f64,
) -> Result<HypothesisReport> {
    let m = sys.m();
    if phi.len() != m || h.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if phi.len() != m { phi.len() } else { h.m() },
        });
    }
    let p_star = sys.p_star();
    let components = (0..m)
        .map(|i| {
            let order_gap = p_star - sys.order(i, i);
            let exponent = tau + order_gap as f64;
            let c = &h.components()[i];
            ComponentHypothesis {
                component: i + 1,
                order_gap,
                exponent,
                phi_norm: sobolev_norm(&phi[i], exponent),
                h_norm: sobolev_norm(&c.spatial, exponent) * c.profile.sup_abs(horizon),
            }
        })
        .collect();
    Ok(HypothesisReport {
        tau,
        n: sys.n(),
        p_star,
        tau_condition: tau > sys.n() as f64 / 2.0,
        horizon,
        components,
    })
}
