//! Gamma-function helpers used by the Mittag-Leffler series.

use std::f64::consts::PI;

pub use statrs::function::gamma::ln_gamma;

/// `Γ(x)`, exact at the positive integers up to 23 (where `(x-1)!` is a
/// representable double).
pub fn gamma(x: f64) -> f64 {
    if x >= 1.0 && x <= 23.0 && x == x.floor() {
        return (1..x as u64).map(|k| k as f64).product();
    }
    statrs::function::gamma::gamma(x)
}

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    // reduce to r in [-1, 1]; subtracting an even integer is exact here
    let r = x - 2.0 * (x * 0.5).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `1/Γ(z)`, which is entire; returns exactly zero at the poles of `Γ`.
pub fn rgamma(z: f64) -> f64 {
    if z <= 0.0 && z == z.floor() {
        return 0.0;
    }
    if z >= 170.0 {
        return (-ln_gamma(z)).exp();
    }
    if z < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1-z) / π
        let s = sin_pi(z);
        let w = 1.0 - z;
        if w >= 170.0 {
            return s.signum() * (ln_gamma(w) + s.abs().ln() - PI.ln()).exp();
        }
        return s * gamma(w) / PI;
    }
    1.0 / gamma(z)
}

/// `ln |1/Γ(z)|` together with the sign of `1/Γ(z)`; `None` at poles.
pub fn ln_rgamma_signed(z: f64) -> Option<(f64, f64)> {
    if z <= 0.0 && z == z.floor() {
        return None;
    }
    if z > 0.0 {
        return Some((-ln_gamma(z), 1.0));
    }
    let s = sin_pi(z);
    Some((ln_gamma(1.0 - z) + s.abs().ln() - PI.ln(), s.signum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integers_are_exact() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(rgamma(1.0), 1.0);
        assert_eq!(gamma(6.0), 120.0);
    }

    #[test]
    fn poles_are_exact_zeros() {
        for k in 0..20 {
            assert_eq!(rgamma(-(k as f64)), 0.0);
        }
        assert!(ln_rgamma_signed(-3.0).is_none());
    }

    #[test]
    fn reflection_agrees_with_direct_values() {
        // Γ(-0.5) = -2√π
        assert_relative_eq!(rgamma(-0.5), -1.0 / (2.0 * PI.sqrt()), max_relative = 1e-14);
        assert_relative_eq!(rgamma(0.5), 1.0 / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rgamma(5.0), 1.0 / 24.0, max_relative = 1e-14);
        let (l, s) = ln_rgamma_signed(-1.5).unwrap();
        assert_relative_eq!(s * l.exp(), rgamma(-1.5), max_relative = 1e-13);
    }

    #[test]
    fn sin_pi_exact_at_half_integers_and_integers() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-7.0), 0.0);
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert_relative_eq!(sin_pi(2.25), (PI * 0.25).sin(), max_relative = 1e-15);
    }
}
