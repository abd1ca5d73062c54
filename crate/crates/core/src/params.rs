//! Dimensionless parameters shared by every module.
//!
//! All library math works in the groups β = v/c, γ, w = ħΩ₀/(mc²),
//! ΓΩ₀ = (2/3)·α·w and ω₀/Ω₀. Forces come back as the dimensionless
//! coefficient of (e²ħ/mc⁴)·Ω₀³·β, and c = 1 throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reciprocal fine-structure constant used for all published constants.
pub const DEFAULT_INV_ALPHA: f64 = 137.04;

/// Electromagnetic coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    pub inv_alpha: f64,
}

impl PhysicalConstants {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self {
            alpha,
            inv_alpha: 1.0 / alpha,
        })
    }

    pub fn from_inv_alpha(inv_alpha: f64) -> Result<Self> {
        if !(inv_alpha.is_finite() && inv_alpha > 0.0) {
            return Err(Error::domain(format!(
                "1/alpha must be positive, got {inv_alpha}"
            )));
        }
        Ok(Self {
            alpha: 1.0 / inv_alpha,
            inv_alpha,
        })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            alpha: 1.0 / DEFAULT_INV_ALPHA,
            inv_alpha: DEFAULT_INV_ALPHA,
        }
    }
}

/// Rotation state of the oscillator centre in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationConfig {
    /// v/c = Ω₀R/c.
    pub beta: f64,
    /// Lorentz factor (1 − β²)^(−1/2).
    pub gamma: f64,
    /// ħΩ₀/(mc²).
    pub w: f64,
    /// Radiation damping ΓΩ₀ = (2/3)·α·w.
    pub gamma_omega: f64,
    /// ω₀/Ω₀.
    pub omega0_ratio: f64,
    /// Centripetal acceleration a/(cΩ₀) = βγ².
    pub a_ratio: f64,
    pub alpha: f64,
}

impl RotationConfig {
    /// ΓΩ₀γ, the damping measured in units of the proper rotation rate.
    pub fn damping(&self) -> f64 {
        self.gamma_omega * self.gamma
    }

    /// a²/(ωₙ²c²) for harmonic `n`, using the β²γ²/n² convention.
    pub fn accel_group(&self, n: u32) -> f64 {
        let bg = self.beta * self.gamma;
        let n = f64::from(n);
        bg * bg / (n * n)
    }

    /// Config with the same β, ω₀ and α but a prescribed ΓΩ₀.
    pub fn with_gamma_omega(
        beta: f64,
        gamma_omega: f64,
        omega0_ratio: f64,
        alpha: f64,
    ) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        make_config(beta, 1.5 * gamma_omega / alpha, omega0_ratio, alpha)
    }
}

/// Builds a [`RotationConfig`] from the four independent inputs.
pub fn make_config(beta: f64, w: f64, omega0_ratio: f64, alpha: f64) -> Result<RotationConfig> {
    if !(beta.is_finite() && (0.0..1.0).contains(&beta)) {
        return Err(Error::domain(format!("beta must lie in [0, 1), got {beta}")));
    }
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::domain(format!("w must be positive, got {w}")));
    }
    if !(omega0_ratio.is_finite() && omega0_ratio >= 0.0) {
        return Err(Error::domain(format!(
            "omega0/Omega0 must be non-negative, got {omega0_ratio}"
        )));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    Ok(RotationConfig {
        beta,
        gamma,
        w,
        gamma_omega: 2.0 / 3.0 * alpha * w,
        omega0_ratio,
        a_ratio: beta * gamma * gamma,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALPHA: f64 = 1.0 / DEFAULT_INV_ALPHA;

    #[test]
    fn rest_case() {
        let c = make_config(0.0, 1.0, 0.0, ALPHA).unwrap();
        assert_eq!(c.gamma, 1.0);
        assert!((c.gamma_omega - 2.0 / (3.0 * 137.04)).abs() < 1e-15);
        assert_eq!(c.a_ratio, 0.0);
    }

    #[test]
    fn three_four_five() {
        let c = make_config(0.6, 1.0, 0.0, ALPHA).unwrap();
        assert!((c.gamma - 1.25).abs() < 1e-15);
        assert!((c.a_ratio - 0.9375).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(make_config(1.0, 1.0, 0.0, ALPHA), Err(Error::Domain(_))));
        assert!(make_config(-0.1, 1.0, 0.0, ALPHA).is_err());
        assert!(make_config(0.1, 0.0, 0.0, ALPHA).is_err());
        assert!(make_config(0.1, 1.0, -1.0, ALPHA).is_err());
        assert!(make_config(0.1, 1.0, 0.0, 0.0).is_err());
        assert!(make_config(f64::NAN, 1.0, 0.0, ALPHA).is_err());
    }

    #[test]
    fn default_constants() {
        let k = PhysicalConstants::default();
        assert!((k.inv_alpha * k.alpha - 1.0).abs() < 1e-12);
        assert_eq!(k.inv_alpha, 137.04);
        let k2 = PhysicalConstants::from_alpha(0.25).unwrap();
        assert_eq!(k2.inv_alpha, 4.0);
    }

    #[test]
    fn gamma_omega_round_trip() {
        let c = RotationConfig::with_gamma_omega(0.01, 1.0, 0.0, ALPHA).unwrap();
        assert!((c.gamma_omega - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn lorentz_identity(beta in 0.0f64..0.999_999, w in 1e-3f64..1e4) {
            let c = make_config(beta, w, 0.0, ALPHA).unwrap();
            prop_assert!((c.gamma * c.gamma * (1.0 - beta * beta) - 1.0).abs() < 1e-12 * c.gamma * c.gamma);
            prop_assert!((c.gamma_omega / (2.0 / 3.0 * ALPHA * w) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gamma_monotone(b1 in 0.0f64..0.99, db in 1e-6f64..0.009) {
            let g1 = make_config(b1, 1.0, 0.0, ALPHA).unwrap().gamma;
            let g2 = make_config(b1 + db, 1.0, 0.0, ALPHA).unwrap().gamma;
            prop_assert!(g2 > g1);
        }
    }
}
