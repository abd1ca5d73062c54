//! Force balance for the force-free circular orbit.
//!
//! The radial balance `mcΩ₀β = |⟨F⟩ᵣ|` is linear in β on both sides, so β
//! cancels and the balance becomes an equation for `w = ħΩ₀/(mc²)` alone:
//!
//! `1 = (4/9π²)·α·w²·Σₙ (−1)ⁿ⁺¹ cₙ / (1 + (2αw/3)²n²)`
//!
//! where `cₙ` is the harmonic coefficient of the chosen [`Assembly`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forces::{harmonic_coefficient, Assembly};
use crate::quadrature::QuadratureSpec;

/// Bracket searched for the root in w.
pub const W_BRACKET: (f64, f64) = (1.0, 1.0e4);

const ROOT_REL_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentSolution {
    pub alpha: f64,
    pub assembly: Assembly,
    pub n_terms: usize,
    /// ħΩ₀/(mc²)
    pub w: f64,
    /// ΓΩ₀ = (2/3)αw at the solution.
    pub gamma_omega: f64,
    /// R/(r_cl β) = 1/(αw)
    pub r_over_rcl_per_beta: f64,
    /// R/(r_zbw β) = 2/w
    pub r_over_rzbw_per_beta: f64,
    /// Relative force-balance residual at the returned w.
    pub residual: f64,
    /// Harmonic coefficients c₁..c_{n_terms}.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub r_over_rcl_per_beta: f64,
    pub r_over_rzbw_per_beta: f64,
    pub gamma_omega: f64,
    /// R < r_cl for every β < 1.
    pub sub_classical_radius: bool,
    /// "sub-classical-radius" or "classical-radius-or-larger".
    pub conclusion: String,
    /// ΓΩ₀ is not small, so the damping group cannot be expanded.
    pub damping_order_one: bool,
    /// "published assembly" or "non-published assembly".
    pub assembly_label: String,
}

/// `r_zbw / r_cl = 1/(2α)`.
pub fn characteristic_lengths(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 / (2.0 * alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// Right-hand side of the balance divided by the left, minus one.
pub fn balance_residual(w: f64, alpha: f64, coefficients: &[f64]) -> f64 {
    let g = 2.0 * alpha * w / 3.0;
    let sum: f64 = coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i + 1) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * c / (1.0 + (g * n).powi(2))
        })
        .sum();
    4.0 / (9.0 * PI * PI) * alpha * w * w * sum - 1.0
}

/// The single-harmonic solution `w = (3/2)·√(1/(α(c₁/π² − α)))`.
pub fn closed_form_w(alpha: f64, c1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let gap = c1 / (PI * PI) - alpha;
    if gap <= 0.0 {
        return Err(Error::NoRoot {
            lo: W_BRACKET.0,
            hi: W_BRACKET.1,
            f_lo: balance_residual(W_BRACKET.0, alpha, &[c1]),
            f_hi: balance_residual(W_BRACKET.1, alpha, &[c1]),
        });
    }
    Ok(1.5 * (1.0 / (alpha * gap)).sqrt())
}

pub fn solve_orbit(
    alpha: f64,
    assembly: Assembly,
    n_terms: usize,
    spec: &QuadratureSpec,
) -> Result<SelfConsistentSolution> {
    check_alpha(alpha)?;
    if n_terms == 0 {
        return Err(Error::domain("n_terms must be at least 1"));
    }
    let coefficients = (1..=n_terms as u32)
        .map(|n| harmonic_coefficient(n, assembly, spec).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let (w, iterations) = find_root(|w| balance_residual(w, alpha, &coefficients))?;
    Ok(SelfConsistentSolution {
        alpha,
        assembly,
        n_terms,
        w,
        gamma_omega: 2.0 * alpha * w / 3.0,
        r_over_rcl_per_beta: 1.0 / (alpha * w),
        r_over_rzbw_per_beta: 2.0 / w,
        residual: balance_residual(w, alpha, &coefficients).abs(),
        coefficients,
        iterations,
    })
}

/// Bracketed root on [`W_BRACKET`]: bisection safeguarded secant steps.
fn find_root<F: Fn(f64) -> f64>(f: F) -> Result<(f64, usize)> {
    let (mut lo, mut hi) = W_BRACKET;
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot { lo, hi, f_lo, f_hi });
    }
    for it in 1..=MAX_ITERATIONS {
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = 0.5 * (lo + hi);
        // Fall back to bisection when the secant leaves the inner half.
        let x = if secant > lo + 0.25 * (hi - lo) && secant < hi - 0.25 * (hi - lo) {
            secant
        } else {
            mid
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok((x, it));
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        if hi - lo <= ROOT_REL_TOL * lo {
            let x = if f_lo.abs() < f_hi.abs() { lo } else { hi };
            return Ok((x, it));
        }
    }
    Err(Error::NonConvergence {
        best: 0.5 * (lo + hi),
        abs_error: hi - lo,
        evaluations: MAX_ITERATIONS,
    })
}

pub fn verify_regime(solution: &SelfConsistentSolution) -> RegimeReport {
    let sub = solution.r_over_rcl_per_beta < 1.0;
    RegimeReport {
        r_over_rcl_per_beta: solution.r_over_rcl_per_beta,
        r_over_rzbw_per_beta: solution.r_over_rzbw_per_beta,
        gamma_omega: solution.gamma_omega,
        sub_classical_radius: sub,
        conclusion: if sub {
            "sub-classical-radius"
        } else {
            "classical-radius-or-larger"
        }
        .to_string(),
        damping_order_one: solution.gamma_omega >= 0.1,
        assembly_label: match solution.assembly {
            Assembly::Paper => "published assembly",
            Assembly::Components => "non-published assembly",
        }
        .to_string(),
    }
}

/// Relative change of w between `n_terms = 1` and `n_terms`.
pub fn series_shift(alpha: f64, assembly: Assembly, n_terms: usize, spec: &QuadratureSpec) -> Result<f64> {
    let one = solve_orbit(alpha, assembly, 1, spec)?;
    let many = solve_orbit(alpha, assembly, n_terms, spec)?;
    Ok((many.w - one.w) / one.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DEFAULT_INV_ALPHA;

    const ALPHA: f64 = 1.0 / DEFAULT_INV_ALPHA;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_harmonic_orbit() {
        let s = solve_orbit(ALPHA, Assembly::Paper, 1, &spec()).unwrap();
        assert!((s.w / 205.86991305427193 - 1.0).abs() < 1e-9);
        assert!((s.r_over_rcl_per_beta / 0.6656630780422643 - 1.0).abs() < 1e-9);
        assert!((s.gamma_omega / 1.001507652530998 - 1.0).abs() < 1e-9);
        assert!((s.r_over_rzbw_per_beta - 2.0 / s.w).abs() < 1e-15);
        assert!(s.residual < 1e-10);
        let closed = closed_form_w(ALPHA, s.coefficients[0]).unwrap();
        assert!(((s.w - closed) / closed).abs() < 1e-10);
    }

    #[test]
    fn ratio_consistent_with_w() {
        let s = solve_orbit(ALPHA, Assembly::Paper, 3, &spec()).unwrap();
        let via_w = DEFAULT_INV_ALPHA / s.w;
        assert!((s.r_over_rcl_per_beta - via_w).abs() < 1e-12);
        let zbw = characteristic_lengths(ALPHA).unwrap();
        assert!((s.r_over_rcl_per_beta / zbw - s.r_over_rzbw_per_beta).abs() < 1e-14);
    }

    #[test]
    fn lengths() {
        assert!((characteristic_lengths(ALPHA).unwrap() - 68.52).abs() < 1e-12);
        assert_eq!(characteristic_lengths(0.5).unwrap(), 1.0);
        assert_eq!(characteristic_lengths(1.0).unwrap(), 0.5);
        assert!(characteristic_lengths(0.0).is_err());
    }

    #[test]
    fn balance_is_monotone() {
        for n_terms in [1, 2, 6] {
            let c: Vec<f64> = (1..=n_terms)
                .map(|n| harmonic_coefficient(n, Assembly::Paper, &spec()).unwrap().value)
                .collect();
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=400 {
                let w = 10f64.powf(4.0 * f64::from(k) / 400.0);
                let r = balance_residual(w, ALPHA, &c);
                assert!(r > prev, "n_terms={n_terms} w={w}");
                prev = r;
            }
        }
    }

    #[test]
    fn more_harmonics_shift() {
        // ΓΩ₀ ≈ 1 at the root, so the n = 2 term is only damped by 1/5.
        let shift = series_shift(ALPHA, Assembly::Paper, 6, &spec()).unwrap();
        assert!((shift - 0.0843634802650519).abs() < 1e-7, "{shift}");
        let six = solve_orbit(ALPHA, Assembly::Paper, 6, &spec()).unwrap();
        assert!(six.residual < 1e-10);
    }

    #[test]
    fn component_assembly_differs() {
        let paper = solve_orbit(ALPHA, Assembly::Paper, 1, &spec()).unwrap();
        let comp = solve_orbit(ALPHA, Assembly::Components, 1, &spec()).unwrap();
        assert!((comp.w / paper.w - 1.0).abs() > 0.1);
        let report = verify_regime(&comp);
        assert_eq!(report.assembly_label, "non-published assembly");
    }

    #[test]
    fn regime_report() {
        let s = solve_orbit(ALPHA, Assembly::Paper, 1, &spec()).unwrap();
        let r = verify_regime(&s);
        assert_eq!(r.conclusion, "sub-classical-radius");
        assert!(r.sub_classical_radius && r.damping_order_one);
        assert_eq!(r.assembly_label, "published assembly");
        let stress = solve_orbit(1e-4, Assembly::Paper, 1, &spec()).unwrap();
        let _ = verify_regime(&stress);
    }

    #[test]
    fn no_root_is_reported() {
        match solve_orbit(0.5, Assembly::Paper, 1, &spec()) {
            Err(Error::NoRoot { f_lo, f_hi, .. }) => assert!(f_lo < 0.0 && f_hi < 0.0),
            other => panic!("expected NoRoot, got {other:?}"),
        }
        assert!(closed_form_w(0.5, 0.14).is_err());
    }
}
