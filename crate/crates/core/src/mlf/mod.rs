//! Mittag-Leffler functions on the negative real axis.
//!
//! `E_{β,μ}(x) = Σ_k x^k / Γ(βk + μ)` is evaluated in three zones:
//!
//! * `|x| ≤ 1`: the Taylor series with compensated summation;
//! * `|x| ≥ X(β) = min(10^{2/β}, 10^3)`: the algebraic asymptotic expansion
//!   `-Σ_{k≥1} x^{-k} / Γ(μ - βk)` truncated at its smallest term;
//! * otherwise: inversion of the Laplace pair
//!   `t^{μ-1} E_{β,μ}(-λ t^β) ↔ s^{β-μ} / (s^β + λ)` at `t = 1` on a
//!   parabolic contour.

pub mod contour;
pub mod gamma;
mod probes;

pub use probes::{
    laplace_transform_kernel, lemma2_ratio_probe, ml_bound_probe, monotone_on_log_grid,
};

use crate::error::{Error, Result};
use gamma::{ln_rgamma_signed, rgamma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Radius of the Taylor zone.
pub const SERIES_RADIUS: f64 = 1.0;
/// Upper cap on the asymptotic threshold `X(β)`.
pub const ASYMPTOTIC_CAP: f64 = 1e3;

/// Start of the asymptotic zone for order `beta`.
pub fn asymptotic_threshold(beta: f64) -> f64 {
    10f64.powf(2.0 / beta).min(ASYMPTOTIC_CAP)
}

/// Which algorithm [`mittag_leffler`] uses for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Series,
    Contour,
    Asymptotic,
}

pub fn zone_of(beta: f64, x: f64) -> Zone {
    let a = x.abs();
    if a <= SERIES_RADIUS {
        Zone::Series
    } else if a >= asymptotic_threshold(beta) {
        Zone::Asymptotic
    } else {
        Zone::Contour
    }
}

fn check_params(beta: f64, mu: f64, x: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!("order beta = {beta} outside (0, 1]")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mu = {mu} must be positive")));
    }
    if x.is_nan() || x > 0.0 {
        return Err(Error::domain(format!(
            "argument x = {x} unsupported: only x <= 0 is implemented"
        )));
    }
    Ok(())
}

/// `E_{β,μ}(x)` for `β ∈ (0, 1]`, `μ > 0`, `x ≤ 0`.
pub fn mittag_leffler(beta: f64, mu: f64, x: f64) -> Result<f64> {
    check_params(beta, mu, x)?;
    Ok(ml_unchecked(beta, mu, x))
}

/// [`mittag_leffler`] without argument checks; callers guarantee the domain.
pub(crate) fn ml_unchecked(beta: f64, mu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return rgamma(mu);
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if beta == 1.0 && mu == 1.0 {
        return x.exp();
    }
    match zone_of(beta, x) {
        Zone::Series => ml_series(beta, mu, x),
        Zone::Contour => ml_contour(beta, mu, x, contour::DEFAULT_NODES),
        Zone::Asymptotic => ml_asymptotic(beta, mu, x),
    }
}

/// Taylor series with Neumaier summation; accurate for `|x| ≲ 1`.
pub fn ml_series(beta: f64, mu: f64, x: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut xk = 1.0f64;
    for k in 0..10_000 {
        let arg = beta * k as f64 + mu;
        let term = xk * rgamma(arg);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if arg > 2.0 && term.abs() < 1e-18 && (xk.abs() < 1e-300 || xk.abs() <= 1.0) {
            break;
        }
        xk *= x;
        if xk == 0.0 {
            break;
        }
    }
    sum + comp
}

/// Asymptotic expansion for large `|x|`, truncated before its smallest term.
pub fn ml_asymptotic(beta: f64, mu: f64, x: f64) -> f64 {
    let ax = x.abs();
    let ln_ax = ax.ln();
    let mut sum = 0.0f64;
    let mut prev_bound = f64::INFINITY;
    for k in 1..2_000 {
        let kf = k as f64;
        let arg = mu - beta * kf;
        // magnitude bound independent of the sine factor: Γ(1-arg)/(π|x|^k)
        let bound = if arg > 0.0 {
            (-ln_gamma_pos(arg) - kf * ln_ax).exp()
        } else {
            (ln_gamma_pos(1.0 - arg) - std::f64::consts::PI.ln() - kf * ln_ax).exp()
        };
        if bound > prev_bound && arg < 0.0 {
            break;
        }
        prev_bound = bound;
        if let Some((ln_mag, sign)) = ln_rgamma_signed(arg) {
            let mag = (ln_mag - kf * ln_ax).exp();
            // x^{-k} = (-1)^k |x|^{-k}
            let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum -= parity * sign * mag;
        }
        if bound < 1e-20 * sum.abs().max(1e-300) || bound < 1e-300 {
            break;
        }
    }
    sum
}

fn ln_gamma_pos(z: f64) -> f64 {
    gamma::ln_gamma(z)
}

/// Laplace-inversion evaluation at `t = 1` with `n` contour nodes.
pub fn ml_contour(beta: f64, mu: f64, x: f64, n: usize) -> f64 {
    let lam = -x;
    contour::invert_real(
        |s| {
            let sb = if beta == 1.0 { s } else { s.powf(beta) };
            (s.ln() * (beta - mu)).exp() / (sb + lam)
        },
        1.0,
        n,
    )
}

/// Order and decay rate of the kernel `t^{β-1} E_{β,β}(-λ t^β)` and of the
/// relaxation function `E_β(-λ t^β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLKernelSpec {
    pub beta: f64,
    pub lambda: f64,
}

impl MLKernelSpec {
    pub fn new(beta: f64, lambda: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(format!("order beta = {beta} outside (0, 1]")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!(
                "decay rate lambda = {lambda} must be >= 0"
            )));
        }
        Ok(MLKernelSpec { beta, lambda })
    }

    /// Laplace transform of the kernel: `1 / (s^β + λ)`.
    #[inline]
    pub fn resolvent(&self, s: Complex64) -> Complex64 {
        let sb = if self.beta == 1.0 {
            s
        } else {
            s.powf(self.beta)
        };
        1.0 / (sb + self.lambda)
    }

    /// Laplace transform of the relaxation function: `s^{β-1} / (s^β + λ)`.
    #[inline]
    pub fn relaxation_transform(&self, s: Complex64) -> Complex64 {
        if self.beta == 1.0 {
            1.0 / (s + self.lambda)
        } else {
            let sb = s.powf(self.beta);
            sb / (s * (sb + self.lambda))
        }
    }

    /// `E_β(-λ t^β)` for `t ≥ 0`.
    pub fn relaxation(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("time t = {t} must be >= 0")));
        }
        Ok(self.relaxation_unchecked(t))
    }

    pub(crate) fn relaxation_unchecked(&self, t: f64) -> f64 {
        if t == 0.0 || self.lambda == 0.0 {
            return 1.0;
        }
        if self.beta == 1.0 {
            return (-self.lambda * t).exp();
        }
        ml_unchecked(self.beta, 1.0, -self.lambda * t.powf(self.beta))
    }

    /// The kernel `t^{β-1} E_{β,β}(-λ t^β)` at `t > 0`.
    pub(crate) fn kernel_unchecked(&self, t: f64) -> f64 {
        let MLKernelSpec { beta, lambda } = *self;
        if lambda == 0.0 {
            return t.powf(beta - 1.0) * rgamma(beta);
        }
        if beta == 1.0 {
            return (-lambda * t).exp();
        }
        t.powf(beta - 1.0) * ml_unchecked(beta, beta, -lambda * t.powf(beta))
    }

    /// `E_{β,β}(-λ t^β)`: the kernel with its `t^{β-1}` factor removed.
    pub(crate) fn kernel_regular_part(&self, t: f64) -> f64 {
        let MLKernelSpec { beta, lambda } = *self;
        if lambda == 0.0 || t == 0.0 {
            return rgamma(beta);
        }
        if beta == 1.0 {
            return (-lambda * t).exp();
        }
        ml_unchecked(beta, beta, -lambda * t.powf(beta))
    }
}

/// `t^{β-1} E_{β,β}(-λ t^β)` for `t > 0`.
pub fn ml_kernel(spec: MLKernelSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("kernel time t = {t} must be > 0")));
    }
    let spec = MLKernelSpec::new(spec.beta, spec.lambda)?;
    Ok(spec.kernel_unchecked(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn documented_values() {
        assert_abs_diff_eq!(
            mittag_leffler(1.0, 1.0, -1.0).unwrap(),
            0.367879441171442,
            epsilon = 1e-14
        );
        assert_eq!(mittag_leffler(0.5, 1.0, 0.0).unwrap(), 1.0);
        // e·erfc(1)
        assert_abs_diff_eq!(
            mittag_leffler(0.5, 1.0, -1.0).unwrap(),
            0.427583576155807,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_out_of_domain_arguments() {
        assert!(matches!(
            mittag_leffler(1.5, 1.0, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mittag_leffler(0.0, 1.0, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mittag_leffler(0.5, 1.0, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            mittag_leffler(0.5, -1.0, -0.1),
            Err(Error::Domain(_))
        ));
        assert!(ml_kernel(
            MLKernelSpec {
                beta: 0.5,
                lambda: 1.0
            },
            0.0
        )
        .is_err());
        assert!(MLKernelSpec::new(0.5, -1.0).is_err());
    }

    #[test]
    fn kernel_documented_values() {
        let k = |beta, lambda, t| ml_kernel(MLKernelSpec { beta, lambda }, t).unwrap();
        assert_abs_diff_eq!(k(1.0, 2.0, 0.5), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(k(0.5, 0.0, 4.0), 0.282094791773878, epsilon = 1e-14);
        // E_{1/2,1/2}(-1) = 1/√π - e·erfc(1)
        let expected = 1.0 / std::f64::consts::PI.sqrt() - 0.427583576155807;
        assert_abs_diff_eq!(k(0.5, 1.0, 1.0), expected, epsilon = 1e-13);
    }

    #[test]
    fn classical_case_is_exponential_in_every_zone() {
        for &x in &[-0.3, -1.0, -3.0, -25.0, -99.0, -150.0, -800.0] {
            let got = mittag_leffler(1.0, 1.0, x).unwrap();
            assert_abs_diff_eq!(got, x.exp(), epsilon = 1e-14);
            // μ = 1 + small offset goes through the general zones
            let near = mittag_leffler(1.0, 1.0 + 1e-12, x).unwrap();
            assert_abs_diff_eq!(near, x.exp(), epsilon = 1e-10);
        }
    }

    #[test]
    fn zones_cover_the_axis() {
        assert_eq!(zone_of(0.5, -0.5), Zone::Series);
        assert_eq!(zone_of(0.5, -10.0), Zone::Contour);
        assert_eq!(zone_of(0.5, -1e3), Zone::Asymptotic);
        assert_eq!(zone_of(1.0, -100.0), Zone::Asymptotic);
        assert_eq!(asymptotic_threshold(1.0), 100.0);
    }
}
