//! Renormalized average force on the rotating oscillator.
//!
//! Three components act along the radial direction:
//!
//! * `f_main`: the ṗ × B term, driven by ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ;
//! * `f_grad1`: the p ∂⁽¹⁾E⁽³⁾ term, driven by ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ᵣ;
//! * `f_grad2`: the p ∂⁽³⁾E⁽¹⁾ term, driven by ⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩ᵣ.
//!
//! Closed harmonic series are returned as the dimensionless coefficient of
//! `(e²ħ/mc⁴)·Ω₀³·β`. The direct δ-quadrature routes keep the β and return
//! the coefficient of `(e²ħ/mc⁴)·Ω₀³`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::{
    cf_e3d1e3_r_with, cf_e3d3e1_r_with, cf_ezhy_r_with, BoseEval, E3d1Path, LagPhase,
};
use crate::error::{Error, Result};
use crate::params::RotationConfig;
use crate::quadrature::{
    integrate_finite, try_integrate_bose, try_integrate_finite, try_integrate_angular,
    QuadratureResult, QuadratureSpec,
};
use crate::regularization::s_r_eval;
use crate::response::{harmonic_response, selectivity_f1d, selectivity_fd};
use crate::special::bessel_i0;

/// Unit tag of every series-form force coefficient.
pub const FORCE_UNITS: &str = "(e²ħ/mc⁴)Ω₀³β";

/// Unit tag of the δ-quadrature routes.
pub const FORCE_UNITS_UNSCALED: &str = "(e²ħ/mc⁴)Ω₀³";

/// Small-β closed forms are refused at or above this speed.
pub const BETA_GATE: f64 = 0.1;

/// Closed forms assume ω₀/Ω₀ below this.
pub const OMEGA0_GATE: f64 = 0.01;

/// Default harmonic cutoff for force series.
pub const DEFAULT_N_MAX: usize = 12;

/// How the total force is assembled from harmonic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assembly {
    /// Published combined coefficients `J̃ₙ = 12Xₙ + J₁,ₙ/n²`.
    #[default]
    Paper,
    /// Sum of the separately derived components, `8Xₙ + J₁,ₙ/n²`.
    Components,
}

impl Assembly {
    pub fn name(self) -> &'static str {
        match self {
            Assembly::Paper => "paper",
            Assembly::Components => "components",
        }
    }
}

/// A truncated harmonic series together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSeries {
    pub value: f64,
    /// `(n, term)` pairs, n ascending.
    pub terms: Vec<(u32, f64)>,
    /// Magnitude of the first omitted term.
    pub truncation_bound: f64,
    /// Accumulated quadrature error of the coefficients.
    pub abs_error_estimate: f64,
}

/// One harmonic of both assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub n: u32,
    pub main: f64,
    pub grad1: f64,
    /// `main + grad1`
    pub components: f64,
    /// Term of the published J̃ assembly.
    pub paper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceBreakdown {
    pub f_main: f64,
    pub f_grad1: f64,
    pub f_grad2: f64,
    /// `f_main + f_grad1 + f_grad2`
    pub total: f64,
    /// `−(4/9π²) Σ (−1)ⁿ⁺¹ J̃ₙ/(1 + (ΓΩ₀)²n²)`
    pub total_paper: f64,
    /// `total − total_paper`
    pub assembly_gap: f64,
    pub per_harmonic: Vec<HarmonicTerm>,
    pub truncation_bound: f64,
    pub abs_error_estimate: f64,
    pub units: String,
}

impl ForceBreakdown {
    pub fn total_for(&self, assembly: Assembly) -> f64 {
        match assembly {
            Assembly::Paper => self.total_paper,
            Assembly::Components => self.total,
        }
    }
}

const DECAY: f64 = PI;

/// `∫₀^∞ f` with the range split at `x0` (a sign change of the integrand).
fn integrate_split<F>(f: F, x0: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    let head = if x0 > 0.0 {
        integrate_finite(&f, 0.0, x0, spec)?
    } else {
        QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        }
    };
    let tail = crate::quadrature::integrate_semi_infinite(|u| f(x0 + u), DECAY, spec)?;
    Ok(QuadratureResult {
        value: head.value + tail.value,
        abs_error_estimate: head.abs_error_estimate + tail.abs_error_estimate,
        evaluations: head.evaluations + tail.evaluations,
    })
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("harmonic index must be at least 1"));
    }
    Ok(())
}

/// `[x² + (n−1)²]·[x² + (n+1)²]` with the x² factor removed when n = 1.
fn reduced_denominator(x: f64, n: f64) -> (f64, bool) {
    let x2 = x * x;
    if n == 1.0 {
        (x2 + 4.0, true)
    } else {
        ((x2 + (n - 1.0).powi(2)) * (x2 + (n + 1.0).powi(2)), false)
    }
}

/// `Xₙ = ∫₀^∞ x⁴ e^{−πx} / ([x²+(n+1)²][x²+(n−1)²]) dx`.
pub fn integral_x_n(n: u32, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_n(n)?;
    let nf = f64::from(n);
    integrate_split(
        |x| {
            let (d, reduced) = reduced_denominator(x, nf);
            let num = if reduced { x * x } else { x.powi(4) };
            num * (-PI * x).exp() / d
        },
        0.0,
        spec,
    )
}

/// `J₁,ₙ = ∫₀^∞ x⁴ e^{−πx}(n² − 1 − x²) / ([(n−1)²+x²][(n+1)²+x²]) dx`.
pub fn integral_j1_n(n: u32, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_n(n)?;
    let nf = f64::from(n);
    let root = (nf * nf - 1.0).sqrt();
    integrate_split(
        |x| {
            let (d, reduced) = reduced_denominator(x, nf);
            if reduced {
                -x.powi(4) * (-PI * x).exp() / d
            } else {
                x.powi(4) * (-PI * x).exp() * (nf * nf - 1.0 - x * x) / d
            }
        },
        root,
        spec,
    )
}

/// `J̃ₙ = ∫₀^∞ x⁴ e^{−πx}(12 + (n² − 1 − x²)/n²) / ([(n−1)²+x²][(n+1)²+x²]) dx`.
pub fn integral_jtilde_n(n: u32, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_n(n)?;
    let nf = f64::from(n);
    let n2 = nf * nf;
    let root = (13.0 * n2 - 1.0).sqrt();
    integrate_split(
        |x| {
            let (d, reduced) = reduced_denominator(x, nf);
            let x2 = x * x;
            let weight = 12.0 + (n2 - 1.0 - x2) / n2;
            let num = if reduced { x2 } else { x2 * x2 };
            num * (-PI * x).exp() * weight / d
        },
        root,
        spec,
    )
}

/// Harmonic coefficient `cₙ` of the chosen assembly: `J̃ₙ` or `8Xₙ + J₁,ₙ/n²`.
pub fn harmonic_coefficient(n: u32, assembly: Assembly, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    match assembly {
        Assembly::Paper => integral_jtilde_n(n, spec),
        Assembly::Components => {
            let x = integral_x_n(n, spec)?;
            let j = integral_j1_n(n, spec)?;
            let n2 = f64::from(n).powi(2);
            Ok(QuadratureResult {
                value: 8.0 * x.value + j.value / n2,
                abs_error_estimate: 8.0 * x.abs_error_estimate + j.abs_error_estimate / n2,
                evaluations: x.evaluations + j.evaluations,
            })
        }
    }
}

/// Closed form of `I₁,ₙ(x) = (1/2π)∫_{−π}^{π} sin(nδ + φₙ) sinδ sinh(xδ) dδ`:
/// `(1/π)(−1)ⁿ⁺¹ sinh(πx) sinφₙ (n² − 1 − x²)/([(n−1)² + x²][(n+1)² + x²])`.
pub fn integral_i1_n(x: f64, n: u32, config: &RotationConfig) -> Result<f64> {
    check_n(n)?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let sin_phi = harmonic_response(n, config)?.sin_phi;
    let nf = f64::from(n);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let x2 = x * x;
    let rational = (nf * nf - 1.0 - x2) / ((x2 + (nf - 1.0).powi(2)) * (x2 + (nf + 1.0).powi(2)));
    Ok(sign * (PI * x).sinh() * sin_phi * rational / PI)
}

/// The defining δ-integral of [`integral_i1_n`], by adaptive quadrature.
pub fn integral_i1_n_quadrature(
    x: f64,
    n: u32,
    config: &RotationConfig,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_n(n)?;
    let phi = harmonic_response(n, config)?.phi();
    let nf = f64::from(n);
    let s = spec.with_min_panels(spec.min_panels.max(4 * n as usize));
    let r = integrate_finite(
        |d| (nf * d + phi).sin() * d.sin() * (x * d).sinh(),
        -PI,
        PI,
        &s,
    )?;
    Ok(QuadratureResult {
        value: r.value / (2.0 * PI),
        abs_error_estimate: r.abs_error_estimate / (2.0 * PI),
        evaluations: r.evaluations,
    })
}

fn gate_small_beta(config: &RotationConfig) -> Result<()> {
    if config.beta >= BETA_GATE {
        return Err(Error::regime(format!(
            "small-β force requires β < {BETA_GATE}, got {}",
            config.beta
        )));
    }
    gate_omega0(config)
}

fn gate_omega0(config: &RotationConfig) -> Result<()> {
    if config.omega0_ratio >= OMEGA0_GATE {
        return Err(Error::regime(format!(
            "force closed forms require ω₀/Ω₀ < {OMEGA0_GATE}, got {}",
            config.omega0_ratio
        )));
    }
    Ok(())
}

fn alternating_sign(n: u32) -> f64 {
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Per-harmonic values for n = 1..=n_max+1, computed in parallel, ordered by n.
fn coefficient_table<T, F>(n_max: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u32) -> Result<T> + Sync + Send,
{
    (1..=(n_max as u32 + 1)).into_par_iter().map(f).collect()
}

fn assemble<F>(coeffs: &[QuadratureResult], n_max: usize, term: F) -> HarmonicSeries
where
    F: Fn(u32, f64) -> f64,
{
    let mut value = 0.0;
    let mut err = 0.0;
    let mut terms = Vec::with_capacity(n_max);
    for (i, c) in coeffs.iter().take(n_max).enumerate() {
        let n = i as u32 + 1;
        let t = term(n, c.value);
        value += t;
        err += term(n, c.abs_error_estimate).abs();
        terms.push((n, t));
    }
    let next = n_max as u32 + 1;
    HarmonicSeries {
        value,
        terms,
        truncation_bound: term(next, coeffs[n_max].value).abs(),
        abs_error_estimate: err,
    }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    Ok(())
}

/// `−(32/9π²) Σₙ (−1)ⁿ⁺¹ Xₙ/(1 + (ΓΩ₀)²n²)`.
pub fn force_main_smallbeta(config: &RotationConfig, n_max: usize, spec: &QuadratureSpec) -> Result<HarmonicSeries> {
    gate_small_beta(config)?;
    check_n_max(n_max)?;
    let coeffs = coefficient_table(n_max, |n| integral_x_n(n, spec))?;
    Ok(main_series(&coeffs, config, n_max))
}

fn main_series(coeffs: &[QuadratureResult], config: &RotationConfig, n_max: usize) -> HarmonicSeries {
    let g = config.gamma_omega;
    assemble(coeffs, n_max, |n, x| {
        let nf = f64::from(n);
        -32.0 / (9.0 * PI * PI) * alternating_sign(n) * x / (1.0 + (g * nf).powi(2))
    })
}

/// `−(4/9π²) Σₙ (−1)ⁿ⁺¹ (1 − r) J₁,ₙ / (n²((1 − r)² + (ΓΩ₀)²n²))`, `r = ω₀²/(Ω₀²n²)`.
pub fn force_grad1_smallbeta(config: &RotationConfig, n_max: usize, spec: &QuadratureSpec) -> Result<HarmonicSeries> {
    gate_small_beta(config)?;
    check_n_max(n_max)?;
    let coeffs = coefficient_table(n_max, |n| integral_j1_n(n, spec))?;
    Ok(grad1_series(&coeffs, config, n_max))
}

fn grad1_series(coeffs: &[QuadratureResult], config: &RotationConfig, n_max: usize) -> HarmonicSeries {
    let g = config.gamma_omega;
    let w0 = config.omega0_ratio;
    assemble(coeffs, n_max, |n, j| {
        let nf = f64::from(n);
        let detune = 1.0 - (w0 / nf).powi(2);
        -4.0 / (9.0 * PI * PI) * alternating_sign(n) * detune * j
            / (nf * nf * (detune * detune + (g * nf).powi(2)))
    })
}

/// The p ∂⁽³⁾E⁽¹⁾ force at small β: identically zero, because the angular
/// integrals of its correlator vanish at leading order.
pub fn force_grad2_smallbeta(config: &RotationConfig) -> Result<f64> {
    gate_small_beta(config)?;
    Ok(0.0)
}

/// `−(4/9π²) Σₙ (−1)ⁿ⁺¹ J̃ₙ/(1 + (ΓΩ₀)²n²)`.
pub fn force_total_paper(config: &RotationConfig, n_max: usize, spec: &QuadratureSpec) -> Result<HarmonicSeries> {
    gate_small_beta(config)?;
    check_n_max(n_max)?;
    let coeffs = coefficient_table(n_max, |n| integral_jtilde_n(n, spec))?;
    Ok(paper_series(&coeffs, config, n_max))
}

fn paper_series(coeffs: &[QuadratureResult], config: &RotationConfig, n_max: usize) -> HarmonicSeries {
    let g = config.gamma_omega;
    assemble(coeffs, n_max, |n, jt| {
        let nf = f64::from(n);
        -4.0 / (9.0 * PI * PI) * alternating_sign(n) * jt / (1.0 + (g * nf).powi(2))
    })
}

/// All small-β components plus both total assemblies.
pub fn force_total_smallbeta(config: &RotationConfig, n_max: usize, spec: &QuadratureSpec) -> Result<ForceBreakdown> {
    gate_small_beta(config)?;
    check_n_max(n_max)?;
    let table = coefficient_table(n_max, |n| {
        Ok((
            integral_x_n(n, spec)?,
            integral_j1_n(n, spec)?,
            integral_jtilde_n(n, spec)?,
        ))
    })?;
    let xs: Vec<_> = table.iter().map(|t| t.0).collect();
    let js: Vec<_> = table.iter().map(|t| t.1).collect();
    let jts: Vec<_> = table.iter().map(|t| t.2).collect();
    Ok(breakdown_from(config, n_max, &xs, &js, &jts))
}

fn breakdown_from(
    config: &RotationConfig,
    n_max: usize,
    xs: &[QuadratureResult],
    js: &[QuadratureResult],
    jts: &[QuadratureResult],
) -> ForceBreakdown {
    let main = main_series(xs, config, n_max);
    let grad1 = grad1_series(js, config, n_max);
    let paper = paper_series(jts, config, n_max);
    let f_grad2 = 0.0;
    let total = main.value + grad1.value + f_grad2;
    let per_harmonic = (0..n_max)
        .map(|i| HarmonicTerm {
            n: i as u32 + 1,
            main: main.terms[i].1,
            grad1: grad1.terms[i].1,
            components: main.terms[i].1 + grad1.terms[i].1,
            paper: paper.terms[i].1,
        })
        .collect();
    ForceBreakdown {
        f_main: main.value,
        f_grad1: grad1.value,
        f_grad2,
        total,
        total_paper: paper.value,
        assembly_gap: total - paper.value,
        per_harmonic,
        truncation_bound: (main.truncation_bound + grad1.truncation_bound).max(paper.truncation_bound),
        abs_error_estimate: main.abs_error_estimate + grad1.abs_error_estimate + paper.abs_error_estimate,
        units: FORCE_UNITS.to_string(),
    }
}

/// `W(δ) = ½∫do (1 + k̂_z²) S_r(F)`, the β-stripped kernel of the ṗ × B force.
fn main_kernel(delta: f64, config: &RotationConfig, spec: &QuadratureSpec, bose: BoseEval) -> Result<f64> {
    let lag = LagPhase::new(delta, config);
    match bose {
        BoseEval::Closed => {
            let r = try_integrate_angular(
                |t, p| {
                    let kz = t.cos();
                    Ok((1.0 + kz * kz) * s_r_eval(lag.big_f(t, p), bose, spec)?)
                },
                spec,
            )?;
            Ok(0.5 * r.value)
        }
        BoseEval::Integral => {
            // ½∫2x³cosh(xδ)/(e^{2πx}−1)·∫θ sinθ(1+cos²θ)·2π I₀(2xβ sin(δ/2) sinθ)
            let c = 2.0 * config.beta * (0.5 * delta).sin();
            let inner = spec.scaled(0.1);
            let r = try_integrate_bose(
                |x| {
                    let ang = try_integrate_finite(
                        |t| {
                            let (st, ct) = t.sin_cos();
                            Ok(st * (1.0 + ct * ct) * 2.0 * PI * bessel_i0(c * x * st))
                        },
                        0.0,
                        PI,
                        &inner,
                    )?;
                    Ok(x.powi(3) * (x * delta).cosh() * ang.value)
                },
                delta.abs() + c.abs(),
                spec,
            )?;
            Ok(r.value)
        }
    }
}

/// General-β ṗ × B force:
/// `−(1/3π³) Σₙ Qₙ / (n[1 + (ΓΩ₀γ)²n²(1 + β²γ²/n²)²])` with
/// `Qₙ = ∫θ sinθ(1+cos²θ)∫φ∫_{−π}^{π}dδ sin nδ sinδ ∫x x³cosh(xδ)cosh(2xβ sin(δ/2) sinθ sinφ)/(e^{2πx}−1)`.
pub fn force_main_general(config: &RotationConfig, n_max: usize, spec: &QuadratureSpec) -> Result<HarmonicSeries> {
    force_main_general_with(config, n_max, spec, BoseEval::Closed)
}

pub fn force_main_general_with(
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
    bose: BoseEval,
) -> Result<HarmonicSeries> {
    gate_omega0(config)?;
    check_n_max(n_max)?;
    let g = config.damping();
    let q = coefficient_table(n_max, |n| {
        let nf = f64::from(n);
        let s = spec.with_min_panels(spec.min_panels.max(2 * n as usize));
        // The kernel is even in δ, so fold onto [0, π].
        let r = try_integrate_finite(
            |d| Ok((nf * d).sin() * d.sin() * main_kernel(d, config, spec, bose)?),
            0.0,
            PI,
            &s,
        )?;
        Ok(QuadratureResult {
            value: 2.0 * r.value,
            abs_error_estimate: 2.0 * r.abs_error_estimate,
            evaluations: r.evaluations,
        })
    })?;
    Ok(assemble(&q, n_max, |n, qn| {
        let nf = f64::from(n);
        let corr = 1.0 + config.accel_group(n);
        -qn / (3.0 * PI.powi(3) * nf * (1.0 + (g * nf * corr).powi(2)))
    }))
}

/// `(1/2π)∫_{−π}^{π} dδ f(δ)` with at least `4·n_max` panels.
fn period_average<F>(f: F, n_max: usize, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let s = spec.with_min_panels(spec.min_panels.max(4 * n_max));
    let r = try_integrate_finite(f, -PI, PI, &s)?;
    Ok(QuadratureResult {
        value: r.value / (2.0 * PI),
        abs_error_estimate: r.abs_error_estimate / (2.0 * PI),
        evaluations: r.evaluations,
    })
}

/// `−(1/(3π²γ))·⟨f_d·⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ⟩` over one period, in units of (e²ħ/mc⁴)Ω₀³.
pub fn force_main_quadrature(
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_n_max(n_max)?;
    let r = period_average(
        |d| Ok(selectivity_fd(d, config, n_max) * cf_ezhy_r_with(d, config, spec, BoseEval::Closed)?.value),
        n_max,
        spec,
    )?;
    Ok(scale(r, -1.0 / (3.0 * PI * PI * config.gamma)))
}

/// `(1/(6π²γ²))·⟨f₁,d·⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ᵣ⟩`, in units of (e²ħ/mc⁴)Ω₀³.
pub fn force_grad1_quadrature(
    config: &RotationConfig,
    n_max: usize,
    path: E3d1Path,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_n_max(n_max)?;
    let r = period_average(
        |d| {
            Ok(selectivity_f1d(d, config, n_max)
                * cf_e3d1e3_r_with(d, config, spec, path, BoseEval::Closed)?.value)
        },
        n_max,
        spec,
    )?;
    Ok(scale(r, 1.0 / (6.0 * PI * PI * config.gamma * config.gamma)))
}

/// `(1/(3π²γ²))·⟨f₁,d·⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩ᵣ⟩`, in units of (e²ħ/mc⁴)Ω₀³.
pub fn force_grad2_quadrature(
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_n_max(n_max)?;
    let r = period_average(
        |d| Ok(selectivity_f1d(d, config, n_max) * cf_e3d3e1_r_with(d, config, spec, BoseEval::Closed)?.value),
        n_max,
        spec,
    )?;
    Ok(scale(r, 1.0 / (3.0 * PI * PI * config.gamma * config.gamma)))
}

fn scale(r: QuadratureResult, factor: f64) -> QuadratureResult {
    QuadratureResult {
        value: r.value * factor,
        abs_error_estimate: r.abs_error_estimate * factor.abs(),
        evaluations: r.evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_config, DEFAULT_INV_ALPHA};

    const ALPHA: f64 = 1.0 / DEFAULT_INV_ALPHA;

    const X_REF: [f64; 6] = [
        0.013020384859254332,
        0.002569008207643683,
        0.0006858468363077776,
        0.0002475634028169967,
        0.000108664517854727,
        5.457444328969526e-05,
    ];
    const J1_REF: [f64; 6] = [
        -0.012421529429381645,
        0.003494190621546335,
        0.004038794642005019,
        0.0031206939036514695,
        0.002328503677595306,
        0.0017634254723779513,
    ];
    const JT_REF: [f64; 6] = [
        0.1438230888816704,
        0.03170164614711078,
        0.008678916995916112,
        0.003165804202782177,
        0.0013971143613605362,
        0.0007038773603757304,
    ];

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn cfg(beta: f64, gamma_omega: f64) -> RotationConfig {
        RotationConfig::with_gamma_omega(beta, gamma_omega, 0.0, ALPHA).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn frozen_coefficients() {
        for n in 1..=6u32 {
            let i = n as usize - 1;
            let x = integral_x_n(n, &spec()).unwrap().value;
            let j = integral_j1_n(n, &spec()).unwrap().value;
            let jt = integral_jtilde_n(n, &spec()).unwrap().value;
            assert!(rel(x, X_REF[i]) < 1e-9, "X_{n} = {x}");
            assert!(rel(j, J1_REF[i]) < 1e-9, "J1_{n} = {j}");
            assert!(rel(jt, JT_REF[i]) < 1e-9, "Jt_{n} = {jt}");
        }
    }

    #[test]
    fn jtilde_decomposes() {
        for n in 1..=24u32 {
            let x = integral_x_n(n, &spec()).unwrap().value;
            let j = integral_j1_n(n, &spec()).unwrap().value;
            let jt = integral_jtilde_n(n, &spec()).unwrap().value;
            let n2 = f64::from(n * n);
            assert!(rel(12.0 * x + j / n2, jt) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn first_components_coefficient() {
        let c = harmonic_coefficient(1, Assembly::Components, &spec()).unwrap().value;
        assert!(rel(c, 0.09174154944465301) < 1e-10);
    }

    #[test]
    fn large_n_asymptotics() {
        let lead = 24.0 / PI.powi(5);
        let n = 64u32;
        let nf = f64::from(n);
        let x = integral_x_n(n, &spec()).unwrap().value;
        let j = integral_j1_n(n, &spec()).unwrap().value;
        assert!(rel(x * nf.powi(4), lead) < 5e-3);
        assert!(rel(j * nf * nf, lead) < 5e-3);
    }

    #[test]
    fn zero_harmonic_rejected() {
        assert!(integral_x_n(0, &spec()).is_err());
        assert!(integral_jtilde_n(0, &spec()).is_err());
    }

    #[test]
    fn i1_closed_form_values() {
        let c = cfg(0.0, 1e-14);
        let cases = [
            (1.0, 1, -0.7352155820749955),
            (0.5, 2, -0.17422244558597821),
            (2.0, 3, 2.1306461687121736),
        ];
        for (x, n, want) in cases {
            let got = integral_i1_n(x, n, &c).unwrap();
            assert!(rel(got, want) < 1e-12, "I1({x},{n}) = {got}");
        }
    }

    #[test]
    fn i1_matches_quadrature() {
        let c = cfg(0.0, 0.3);
        for (x, n) in [(0.3, 1), (1.0, 2), (2.5, 5), (0.7, 9)] {
            let closed = integral_i1_n(x, n, &c).unwrap();
            let q = integral_i1_n_quadrature(x, n, &c, &spec()).unwrap().value;
            assert!((closed - q).abs() < 1e-10 * closed.abs().max(1.0), "x={x} n={n}");
        }
    }

    #[test]
    fn regime_gates() {
        let fast = cfg(0.2, 0.1);
        assert!(matches!(
            force_main_smallbeta(&fast, 4, &spec()),
            Err(Error::OutOfRegime(_))
        ));
        let bound = make_config(0.01, 1.0, 0.5, ALPHA).unwrap();
        assert!(matches!(
            force_total_smallbeta(&bound, 4, &spec()),
            Err(Error::OutOfRegime(_))
        ));
        assert!(force_grad2_smallbeta(&cfg(0.01, 0.1)).unwrap() == 0.0);
    }

    #[test]
    fn breakdown_is_consistent() {
        let c = cfg(0.01, 1.0015082723901765);
        let b = force_total_smallbeta(&c, DEFAULT_N_MAX, &spec()).unwrap();
        assert_eq!(b.per_harmonic.len(), DEFAULT_N_MAX);
        assert!((b.f_main + b.f_grad1 + b.f_grad2 - b.total).abs() < 1e-18);
        let paper = force_total_paper(&c, DEFAULT_N_MAX, &spec()).unwrap();
        assert!((paper.value - b.total_paper).abs() < 1e-16);
        let s: f64 = b.per_harmonic.iter().map(|t| t.paper).sum();
        assert!((s - b.total_paper).abs() < 1e-15);
        assert!(b.truncation_bound > 0.0 && b.truncation_bound < 1e-5);
        // The components differ from J̃ by 4Xₙ in every harmonic.
        for t in &b.per_harmonic {
            let x = integral_x_n(t.n, &spec()).unwrap().value;
            let g = c.gamma_omega * f64::from(t.n);
            let four_x = -4.0 / (9.0 * PI * PI) * alternating_sign(t.n) * 4.0 * x / (1.0 + g * g);
            assert!((t.paper - t.components - four_x).abs() < 1e-9 * t.paper.abs(), "n = {}", t.n);
        }
    }

    #[test]
    fn general_main_reduces_to_small_beta() {
        let c = cfg(0.01, 0.5);
        let small = force_main_smallbeta(&c, 6, &spec()).unwrap().value;
        let general = force_main_general(&c, 6, &spec()).unwrap().value;
        assert!(rel(general, small) < 0.03, "{general} vs {small}");
        assert!(rel(general, small) < 5.0 * c.beta);
    }

    #[test]
    fn main_kernel_routes_agree() {
        let c = cfg(0.05, 0.5);
        for d in [0.3, 1.7, 3.0] {
            let a = main_kernel(d, &c, &spec(), BoseEval::Closed).unwrap();
            let b = main_kernel(d, &c, &spec(), BoseEval::Integral).unwrap();
            assert!(rel(b, a) < 1e-7, "δ={d}: {a} vs {b}");
        }
    }

    #[test]
    fn main_quadrature_route() {
        let c = cfg(0.01, 0.5);
        let s = QuadratureSpec::with_tolerances(1e-8, 1e-13);
        let q = force_main_quadrature(&c, 8, &s).unwrap().value / c.beta;
        let general = force_main_general(&c, 8, &s).unwrap().value;
        assert!(rel(q, general) < 1e-6, "{q} vs {general}");
    }

    #[test]
    fn grad1_quadrature_route() {
        let c = cfg(0.01, 0.5);
        let s = QuadratureSpec::with_tolerances(1e-8, 1e-13);
        let q = force_grad1_quadrature(&c, 8, E3d1Path::SmallBeta, &s).unwrap().value / c.beta;
        let closed = force_grad1_smallbeta(&c, 8, &s).unwrap().value;
        assert!(rel(q, closed) < 1e-3, "{q} vs {closed}");
    }

    #[test]
    fn grad2_vanishes_at_rest() {
        let c = cfg(0.0, 0.5);
        let s = QuadratureSpec::with_tolerances(1e-8, 1e-13);
        let q = force_grad2_quadrature(&c, 8, &s).unwrap().value;
        assert!(q.abs() < 1e-12, "{q}");
    }
}
