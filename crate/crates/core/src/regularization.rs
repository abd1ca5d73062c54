//! Abel–Plana regularization of the divergent harmonic mode sums.
//!
//! The discrete-spectrum kernels
//!
//! * `S_d(F) = Σₙ n³ cos nF`
//! * `S₁(F) = Σₙ n⁴ sin nF = −dS_d/dF`
//!
//! diverge. Abel–Plana splits each into a continuum part (`S_c = 6/F⁴`,
//! `S₁,c = 24/F⁵`) and a convergent remainder:
//!
//! * `S_r(F) = ∫₀^∞ 2x³ cosh(xF)/(e^{2πx} − 1) dx`
//! * `S₁,r(F) = −∫₀^∞ 2x⁴ sinh(xF)/(e^{2πx} − 1) dx`
//!
//! Each remainder is available in closed, integral and partial-fraction form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    check_bose_growth, integrate_semi_infinite, try_integrate_bose, QuadratureResult,
    QuadratureSpec,
};

const TWO_PI: f64 = 2.0 * PI;

/// Below this |F| the closed forms are replaced by their even power series.
pub const F_SERIES_THRESHOLD: f64 = 1.0;

/// Default symmetric truncation for the partial-fraction sums.
pub const DEFAULT_PARTIAL_FRACTION_TERMS: usize = 2000;

/// Taylor coefficients of S_r: `|B_{2k+4}| / ((2k+4)·(2k)!)`.
const SR_SERIES: [f64; 13] = [
    8.333_333_333_333_333_3e-3,
    1.984_126_984_126_984_1e-3,
    1.736_111_111_111_111_1e-4,
    1.052_188_552_188_552_2e-5,
    5.231_348_237_300_618_3e-7,
    2.296_443_268_665_490_9e-8,
    9.253_827_208_960_651_2e-10,
    3.503_113_318_961_360_6e-11,
    1.264_468_661_341_657_2e-12,
    4.396_184_257_031_463_2e-14,
    1.482_801_417_514_438_7e-15,
    4.877_895_714_688_665_1e-17,
    1.571_342_308_445_089_5e-18,
];

/// How the Bose-type remainders are evaluated inside larger integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoseEval {
    /// Closed trigonometric forms (series near F = 0).
    #[default]
    Closed,
    /// Semi-infinite quadrature of the defining integrals.
    Integral,
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Closed,
    Series,
    Integral,
    PartialFractions,
}

/// The three Abel–Plana terms of `Σ_{n≥0} f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelPlanaTerms {
    /// ∫₀^∞ f(x) dx
    pub integral: f64,
    /// f(0)/2
    pub half_f0: f64,
    /// i∫₀^∞ [f(it) − f(−it)]/(e^{2πt} − 1) dt
    pub remainder: f64,
}

impl AbelPlanaTerms {
    pub fn sum(&self) -> f64 {
        self.integral + self.half_f0 + self.remainder
    }
}

/// Abel–Plana split of `Σ_{n≥0} f(n)`.
///
/// `decay_rate` is the exponential decay of `f` along the positive real axis
/// and `growth` bounds the exponential growth of `f(±it)`; `growth ≥ 2π`
/// makes the remainder diverge. A real-axis integrand that does not decay
/// (e.g. `f = 1`) is reported as a domain error.
pub fn abel_plana_split<F>(
    f: F,
    decay_rate: f64,
    growth: f64,
    spec: &QuadratureSpec,
) -> Result<AbelPlanaTerms>
where
    F: Fn(Complex64) -> Complex64,
{
    let remainder = abel_plana_remainder(&f, growth, spec)?.value;
    let integral = integrate_semi_infinite(|x| f(Complex64::new(x, 0.0)).re, decay_rate, spec)?.value;
    Ok(AbelPlanaTerms {
        integral,
        half_f0: 0.5 * f(Complex64::new(0.0, 0.0)).re,
        remainder,
    })
}

/// Only the convergent remainder `i∫₀^∞ [f(it) − f(−it)]/(e^{2πt} − 1) dt`.
pub fn abel_plana_remainder<F>(f: F, growth: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Complex64,
{
    try_integrate_bose(
        |t| {
            let d = f(Complex64::new(0.0, t)) - f(Complex64::new(0.0, -t));
            Ok(-d.im)
        },
        growth,
        spec,
    )
}

fn check_pole(f: f64, allow_zero: bool) -> Result<()> {
    if !f.is_finite() {
        return Err(Error::domain(format!("F must be finite, got {f}")));
    }
    let k = (f / TWO_PI).round();
    if (k != 0.0 || !allow_zero) && (f - k * TWO_PI).abs() <= 1e-12 * f.abs().max(1.0) {
        return Err(Error::Pole(f));
    }
    Ok(())
}

fn check_strip(f: f64) -> Result<()> {
    if !(f.is_finite() && f.abs() < TWO_PI) {
        return Err(Error::domain(format!(
            "the Bose integral converges only for |F| < 2π, got F = {f}"
        )));
    }
    Ok(())
}

/// Continuum part `S_c = 6/F⁴`.
pub fn s_c_closed(f: f64) -> Result<f64> {
    if f == 0.0 || !f.is_finite() {
        return Err(Error::Pole(f));
    }
    Ok(6.0 / f.powi(4))
}

/// Continuum part `S₁,c = 24/F⁵`.
pub fn s1_c_closed(f: f64) -> Result<f64> {
    if f == 0.0 || !f.is_finite() {
        return Err(Error::Pole(f));
    }
    Ok(24.0 / f.powi(5))
}

fn s_r_series(f: f64) -> f64 {
    let f2 = f * f;
    SR_SERIES.iter().rev().fold(0.0, |acc, c| acc * f2 + c)
}

fn s1_r_series(f: f64) -> f64 {
    let f2 = f * f;
    let mut acc = 0.0;
    for k in (1..SR_SERIES.len()).rev() {
        acc = acc * f2 + 2.0 * k as f64 * SR_SERIES[k];
    }
    -f * acc
}

/// `S_r = (3 − 2 sin²(F/2))/(8 sin⁴(F/2)) − 6/F⁴`, with its power series near 0.
pub fn s_r_closed(f: f64) -> Result<f64> {
    check_pole(f, true)?;
    if f.abs() < F_SERIES_THRESHOLD {
        return Ok(s_r_series(f));
    }
    let s2 = (0.5 * f).sin().powi(2);
    Ok((3.0 - 2.0 * s2) / (8.0 * s2 * s2) - 6.0 / f.powi(4))
}

/// `S₁,r = −dS_r/dF = cos(F/2)(3 − sin²(F/2))/(4 sin⁵(F/2)) − 24/F⁵`.
pub fn s1_r_closed(f: f64) -> Result<f64> {
    check_pole(f, true)?;
    if f.abs() < F_SERIES_THRESHOLD {
        return Ok(s1_r_series(f));
    }
    let (s, c) = (0.5 * f).sin_cos();
    Ok(c * (3.0 - s * s) / (4.0 * s.powi(5)) - 24.0 / f.powi(5))
}

/// `∫₀^∞ 2x³ cosh(xF)/(e^{2πx} − 1) dx`.
pub fn s_r_integral(f: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_strip(f)?;
    check_bose_growth(f)?;
    let a = f.abs();
    // Written with decaying exponentials only, so nothing overflows near |F| = 2π.
    integrate_semi_infinite(
        |x| {
            let denom = -(-TWO_PI * x).exp_m1();
            x.powi(3) * ((-(TWO_PI - a) * x).exp() + (-(TWO_PI + a) * x).exp()) / denom
        },
        TWO_PI - a,
        spec,
    )
}

/// `−∫₀^∞ 2x⁴ sinh(xF)/(e^{2πx} − 1) dx`; odd in F.
pub fn s1_r_integral(f: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_strip(f)?;
    if f == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let a = f.abs();
    let r = integrate_semi_infinite(
        |x| {
            let denom = -(-TWO_PI * x).exp_m1();
            x.powi(4) * ((-(TWO_PI - a) * x).exp() - (-(TWO_PI + a) * x).exp()) / denom
        },
        TWO_PI - a,
        spec,
    )?;
    Ok(QuadratureResult {
        value: -f.signum() * r.value,
        ..r
    })
}

/// `S_d = 6·Σ_{n∈ℤ} (2πn + F)^{−4}`, truncated at |n| ≤ `n_terms` plus a
/// midpoint-integral tail.
pub fn s_d_partial_fractions(f: f64, n_terms: usize) -> Result<f64> {
    check_pole(f, false)?;
    if n_terms == 0 {
        return Err(Error::domain("partial-fraction sum needs at least one term"));
    }
    let tail_at = TWO_PI * (n_terms as f64 + 0.5);
    let mut sum = ((tail_at + f).powi(-3) + (tail_at - f).powi(-3)) / (3.0 * TWO_PI);
    for n in (1..=n_terms).rev() {
        let p = TWO_PI * n as f64;
        sum += (p + f).powi(-4) + (p - f).powi(-4);
    }
    sum += f.powi(-4);
    Ok(6.0 * sum)
}

/// `S₁,r = 24·Σ_{n≥1} [(2πn + F)^{−5} − (2πn − F)^{−5}]`, valid for |F| < 2π.
pub fn s1_r_partial_fractions(f: f64, n_terms: usize) -> Result<f64> {
    check_strip(f)?;
    if n_terms == 0 {
        return Err(Error::domain("partial-fraction sum needs at least one term"));
    }
    let tail_at = TWO_PI * (n_terms as f64 + 0.5);
    let mut sum = ((tail_at + f).powi(-4) - (tail_at - f).powi(-4)) / (4.0 * TWO_PI);
    for n in (1..=n_terms).rev() {
        let p = TWO_PI * n as f64;
        sum += (p + f).powi(-5) - (p - f).powi(-5);
    }
    Ok(24.0 * sum)
}

/// S_r through the chosen route.
pub fn s_r_eval(f: f64, mode: BoseEval, spec: &QuadratureSpec) -> Result<f64> {
    match mode {
        BoseEval::Closed => s_r_closed(f),
        BoseEval::Integral => s_r_integral(f, spec).map(|r| r.value),
    }
}

/// S₁,r through the chosen route.
pub fn s1_r_eval(f: f64, mode: BoseEval, spec: &QuadratureSpec) -> Result<f64> {
    match mode {
        BoseEval::Closed => s1_r_closed(f),
        BoseEval::Integral => s1_r_integral(f, spec).map(|r| r.value),
    }
}

/// The (S_d, S_c, S_r) triplet of the n³ cos nF kernel at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSum {
    pub f_arg: f64,
    pub s_c: f64,
    pub s_r: f64,
    pub s_d_partialfrac: f64,
    pub s_c_method: Representation,
    pub s_r_method: Representation,
    pub s_d_method: Representation,
}

impl RegularizedSum {
    /// `|S_d − (S_c + S_r)|`, which should sit at rounding level.
    pub fn consistency_gap(&self) -> f64 {
        (self.s_d_partialfrac - (self.s_c + self.s_r)).abs()
    }
}

/// Evaluates all three representations at `f`.
pub fn regularized_sum(f: f64) -> Result<RegularizedSum> {
    let s_r = s_r_closed(f)?;
    Ok(RegularizedSum {
        f_arg: f,
        s_c: s_c_closed(f)?,
        s_r,
        s_d_partialfrac: s_d_partial_fractions(f, DEFAULT_PARTIAL_FRACTION_TERMS)?,
        s_c_method: Representation::Closed,
        s_r_method: if f.abs() < F_SERIES_THRESHOLD {
            Representation::Series
        } else {
            Representation::Closed
        },
        s_d_method: Representation::PartialFractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn continuum_parts() {
        assert!((s_c_closed(PI).unwrap() - 0.061_595_893_528_106_02).abs() < 1e-15);
        assert_eq!(s_c_closed(1.0).unwrap(), 6.0);
        assert!(matches!(s_c_closed(0.0), Err(Error::Pole(_))));
        assert_eq!(s1_c_closed(2.0).unwrap(), 0.75);
        assert_eq!(s1_c_closed(1.0).unwrap(), 24.0);
        assert_eq!(s1_c_closed(-1.0).unwrap(), -24.0);
    }

    #[test]
    fn s_r_at_zero_and_pi() {
        assert_eq!(s_r_closed(0.0).unwrap(), 1.0 / 120.0);
        let v = s_r_integral(0.0, &spec()).unwrap().value;
        assert!((v - 1.0 / 120.0).abs() < 1e-13);
        let expect = 0.125 - 6.0 / PI.powi(4);
        assert!((s_r_closed(PI).unwrap() - expect).abs() < 1e-15);
        assert!((s_r_closed(PI).unwrap() - 0.063_404_106_471_893_98).abs() < 1e-15);
    }

    #[test]
    fn s_r_closed_matches_integral_at_one() {
        let c = s_r_closed(1.0).unwrap();
        let i = s_r_integral(1.0, &spec()).unwrap().value;
        assert!((c - i).abs() < 1e-12, "{c} {i}");
    }

    #[test]
    fn series_switch_is_seamless() {
        let below = s_r_closed(F_SERIES_THRESHOLD * (1.0 - 1e-12)).unwrap();
        let above = s_r_closed(F_SERIES_THRESHOLD * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-13);
        let below = s1_r_closed(F_SERIES_THRESHOLD * (1.0 - 1e-12)).unwrap();
        let above = s1_r_closed(F_SERIES_THRESHOLD * (1.0 + 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-13);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(s_r_closed(TWO_PI), Err(Error::Pole(_))));
        assert!(matches!(s_r_closed(-4.0 * PI), Err(Error::Pole(_))));
        assert!(matches!(s_d_partial_fractions(0.0, 10), Err(Error::Pole(_))));
        assert!(matches!(s_d_partial_fractions(TWO_PI, 10), Err(Error::Pole(_))));
    }

    #[test]
    fn integral_strip_is_enforced() {
        assert!(matches!(s_r_integral(6.3, &spec()), Err(Error::Domain(_))));
        assert!(matches!(s1_r_integral(-7.0, &spec()), Err(Error::Domain(_))));
    }

    #[test]
    fn near_strip_edge() {
        let f = 6.28;
        let i = s_r_integral(f, &spec()).unwrap().value;
        let pf = s_d_partial_fractions(f, DEFAULT_PARTIAL_FRACTION_TERMS).unwrap() - s_c_closed(f).unwrap();
        assert!(i > 1e10);
        assert!((i / pf - 1.0).abs() < 1e-9, "{i} {pf}");
        assert!((s_r_closed(f).unwrap() / pf - 1.0).abs() < 1e-9);
    }

    #[test]
    fn partial_fractions_at_pi_is_one_eighth() {
        let v = s_d_partial_fractions(PI, DEFAULT_PARTIAL_FRACTION_TERMS).unwrap();
        assert!((v - 0.125).abs() < 1e-14, "{v}");
        let sum = s_c_closed(PI).unwrap() + s_r_closed(PI).unwrap();
        assert!((v - sum).abs() < 1e-14);
    }

    #[test]
    fn partial_fractions_near_pole_dominated() {
        let v = s_d_partial_fractions(0.01, 100).unwrap();
        assert!((v / 6e8 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn s1_r_representations() {
        assert_eq!(s1_r_integral(0.0, &spec()).unwrap().value, 0.0);
        let pf = s1_r_partial_fractions(1.0, DEFAULT_PARTIAL_FRACTION_TERMS).unwrap();
        let i = s1_r_integral(1.0, &spec()).unwrap().value;
        let c = s1_r_closed(1.0).unwrap();
        assert!((pf - i).abs() < 1e-12, "{pf} {i}");
        assert!((pf - c).abs() < 1e-13);
    }

    #[test]
    fn s1_r_small_argument_slope() {
        // The Bose integral gives −2·Γ(6)ζ(6)/(2π)⁶ = −1/252.
        let h = 1e-4;
        let slope = s1_r_integral(h, &spec()).unwrap().value / h;
        assert!((slope + 1.0 / 252.0).abs() < 1e-9, "{slope}");
        assert!((s1_r_closed(h).unwrap() / h + 1.0 / 252.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_coefficient_of_s_r() {
        let h: f64 = 1e-2;
        let c2_integral = (s_r_integral(h, &spec()).unwrap().value - 1.0 / 120.0) / (h * h);
        assert!((c2_integral - SR_SERIES[1]).abs() < 1e-6);
    }

    #[test]
    fn abel_plana_geometric_series() {
        let terms = abel_plana_split(|z| (-z).exp(), 1.0, 0.0, &spec()).unwrap();
        let exact = 1.0 / (1.0 - (-1.0f64).exp());
        assert!((terms.sum() - exact).abs() < 1e-10, "{terms:?}");
        assert_eq!(terms.half_f0, 0.5);
    }

    #[test]
    fn abel_plana_polynomial_times_exponential() {
        for (k, a) in [(1, 0.5), (2, 0.7), (3, 1.3)] {
            let f = move |z: Complex64| z.powi(k) * (-a * z).exp();
            let terms = abel_plana_split(f, a, 0.0, &spec()).unwrap();
            let direct: f64 = (0..2000).rev().map(|n| f(Complex64::new(n as f64, 0.0)).re).sum();
            assert!((terms.sum() - direct).abs() < 1e-10, "k={k}: {} {direct}", terms.sum());
        }
    }

    #[test]
    fn abel_plana_remainder_is_s_r() {
        let f = 1.0;
        let r = abel_plana_remainder(|z| z.powi(3) * (z * f).cos(), f, &spec()).unwrap();
        assert!((r.value - s_r_closed(f).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn abel_plana_rejects_constant() {
        let err = abel_plana_split(|_| Complex64::new(1.0, 0.0), 1.0, 0.0, &spec()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn regularized_triplet() {
        let r = regularized_sum(1.0).unwrap();
        assert!(r.consistency_gap() < 1e-12);
        assert_eq!(r.s_r_method, Representation::Closed);
        assert_eq!(regularized_sum(0.5).unwrap().s_r_method, Representation::Series);
    }

    proptest! {
        #[test]
        fn representations_agree(f in -6.0f64..6.0) {
            prop_assume!(f.abs() > 1e-3);
            let r = regularized_sum(f).unwrap();
            prop_assert!(r.consistency_gap() < 1e-8 * r.s_c.abs().max(1.0));
            let i = s_r_integral(f, &QuadratureSpec::default()).unwrap().value;
            prop_assert!((r.s_r - i).abs() < 1e-8);
        }

        #[test]
        fn parity(f in 0.0f64..6.0) {
            prop_assert_eq!(s_r_closed(f).unwrap(), s_r_closed(-f).unwrap());
            prop_assert_eq!(s1_r_closed(f).unwrap(), -s1_r_closed(-f).unwrap());
            let s = QuadratureSpec::default();
            prop_assert_eq!(s1_r_integral(f, &s).unwrap().value, -s1_r_integral(-f, &s).unwrap().value);
        }

        #[test]
        fn s1_r_closed_matches_partial_fractions(f in -6.0f64..6.0) {
            let pf = s1_r_partial_fractions(f, DEFAULT_PARTIAL_FRACTION_TERMS).unwrap();
            let c = s1_r_closed(f).unwrap();
            prop_assert!((pf - c).abs() < 1e-9 * pf.abs().max(1.0), "{} {}", pf, c);
        }
    }
}
