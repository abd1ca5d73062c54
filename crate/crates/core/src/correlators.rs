//! Two-point field correlators seen by the rotating oscillator.
//!
//! All values are dimensionless prefactors: `ħck₀⁴/(2π²)` is stripped from
//! the E·H correlator and `ħck₀⁵/(2π²)` from the E·∂E correlators. The lag is
//! `δ = Ω₀γ(τ₂ − τ₁)` and the mode phase along the orbit is
//! `F = δ − 2β sin(δ/2) k̂_y`.
//!
//! Renormalized correlators replace the divergent mode sums by their
//! Abel–Plana remainders `S_r` (for n³ cos nF) and `S₁,r` (for n⁴ sin nF).
//! Truncated correlators keep the literal harmonic sums up to `n_max`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use crate::regularization::BoseEval;

use crate::error::{Error, Result};
use crate::params::RotationConfig;
use crate::quadrature::{
    try_integrate_bose, try_integrate_finite, try_integrate_angular, QuadratureResult,
    QuadratureSpec,
};
use crate::regularization::{s1_r_eval, s_r_eval};
use crate::special::{bessel_i0, sinc};

const TWO_PI: f64 = 2.0 * PI;

/// Margin kept below the 2π convergence edge of the Bose integrals.
pub const CONVERGENCE_MARGIN: f64 = 0.05;

/// Time lag together with the orbit-induced phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagPhase {
    pub delta: f64,
    pub beta: f64,
}

impl LagPhase {
    pub fn new(delta: f64, config: &RotationConfig) -> Self {
        Self {
            delta,
            beta: config.beta,
        }
    }

    /// `F = δ·[1 − β·sinc(δ/2)·sinθ·sinφ]`.
    pub fn big_f(&self, theta: f64, phi: f64) -> f64 {
        self.big_f_ky(theta.sin() * phi.sin())
    }

    /// F as a function of the direction cosine k̂_y.
    pub fn big_f_ky(&self, ky: f64) -> f64 {
        self.delta * (1.0 - self.beta * sinc(0.5 * self.delta) * ky)
    }

    /// Largest |F| over all directions.
    pub fn max_abs_f(&self) -> f64 {
        self.delta.abs() * (1.0 + self.beta * sinc(0.5 * self.delta).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrelatorKind {
    /// ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ in its simplified (single cosh kernel) form.
    EzHyR,
    /// ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ with the full angular bracket.
    EzHyRUnsimplified,
    /// ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ᵣ
    E3d1E3R,
    /// ⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩ᵣ
    E3d3E1R,
    /// Literal Σ_{n≤N} n³ cos nF form of ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩.
    EzHyDTruncated,
    /// Literal Σ_{n≤N} n⁴ sin nF form of ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩.
    E3d1E3DTruncated,
    /// Literal Σ_{n≤N} n⁴ sin nF form of ⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩.
    E3d3E1DTruncated,
}

impl CorrelatorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::EzHyR => "EzHy_r",
            Self::EzHyRUnsimplified => "EzHy_r_unsimplified",
            Self::E3d1E3R => "E3d1E3_r",
            Self::E3d3E1R => "E3d3E1_r",
            Self::EzHyDTruncated => "EzHy_d_truncated",
            Self::E3d1E3DTruncated => "E3d1E3_d_truncated",
            Self::E3d3E1DTruncated => "E3d3E1_d_truncated",
        }
    }
}

/// Route for ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ᵣ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum E3d1Path {
    /// F ≈ δ with the angular integral done analytically.
    #[default]
    SmallBeta,
    /// Full ten-term angular bracket under quadrature.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSample {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub kind: CorrelatorKind,
    pub delta: f64,
}

impl CorrelatorSample {
    fn from_result(r: QuadratureResult, kind: CorrelatorKind, delta: f64) -> Self {
        Self {
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
            kind,
            delta,
        }
    }

    fn exact(value: f64, kind: CorrelatorKind, delta: f64) -> Self {
        Self {
            value,
            abs_error_estimate: 0.0,
            kind,
            delta,
        }
    }
}

fn guard(delta: f64, config: &RotationConfig) -> Result<()> {
    if !delta.is_finite() {
        return Err(Error::domain(format!("lag must be finite, got {delta}")));
    }
    if delta.abs() * (1.0 + config.beta) >= TWO_PI - CONVERGENCE_MARGIN {
        return Err(Error::domain(format!(
            "|δ|(1+β) = {} is outside the convergence region (< 2π − {CONVERGENCE_MARGIN})",
            delta.abs() * (1.0 + config.beta)
        )));
    }
    Ok(())
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `∫do h(k̂)` over the unit sphere.
fn sphere<H>(mut h: H, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    H: FnMut([f64; 3]) -> Result<f64>,
{
    try_integrate_angular(|t, p| h(direction(t, p)), spec)
}

/// Angular bracket of the E⁽ᶻ⁾H⁽ʸ⁾ correlator.
pub fn bracket_ezhy(k: [f64; 3], delta: f64, config: &RotationConfig) -> f64 {
    let [kx, ky, kz] = k;
    let g = config.gamma;
    let bg = config.beta * g;
    let (s, c) = (0.5 * delta).sin_cos();
    -kx * g * c - ky * g * s + kx * ky * bg + 0.5 * bg * delta.sin() * (1.0 + kz * kz)
}

/// Ten-term angular bracket of the E⁽³⁾∂⁽¹⁾E⁽³⁾ correlator.
pub fn bracket_e3d1e3(k: [f64; 3], delta: f64, config: &RotationConfig) -> f64 {
    let [k1, k2, k3] = k;
    let b = config.beta;
    let g2 = config.gamma * config.gamma;
    let bg2 = b * b * g2;
    let (s, c) = (0.5 * delta).sin_cos();
    let lead = bg2 * delta.cos() + g2;
    k1 * c * lead + k2 * s * lead - 2.0 * b * g2 * c * c * k1 * k2 - b * g2 * delta.sin() * k2 * k2
        + bg2
            * (-c.powi(3) * k1.powi(3) - s * c * c * k1 * k1 * k2
                + c * s * s * k1 * k2 * k2
                + s.powi(3) * k2.powi(3))
        - g2 * k3 * k3 * (c * k1 + s * k2)
}

/// Angular bracket of the E⁽³⁾∂⁽³⁾E⁽¹⁾ correlator, overall −γ² included.
pub fn bracket_e3d3e1(k: [f64; 3], delta: f64, config: &RotationConfig) -> f64 {
    let [k1, k2, k3] = k;
    let b2 = config.beta * config.beta;
    let g2 = config.gamma * config.gamma;
    let (s, c) = (0.5 * delta).sin_cos();
    -g2 * k3 * k3 * ((1.0 - b2) * k1 * c + (1.0 + b2) * k2 * s)
}

/// ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ, simplified form:
/// `½βγ sinδ ∫₀^∞ 2x³cosh(xδ)/(e^{2πx}−1) ∫do (1+k̂_z²) cosh(2xβ sin(δ/2) k̂_y)`.
pub fn cf_ezhy_r(delta: f64, config: &RotationConfig, spec: &QuadratureSpec) -> Result<CorrelatorSample> {
    cf_ezhy_r_with(delta, config, spec, BoseEval::Closed)
}

/// [`cf_ezhy_r`] with a selectable Bose route.
///
/// `Closed` integrates `(1+k̂_z²)·S_r(F)` over the sphere. `Integral` keeps
/// the printed order: the φ integral becomes `2π I₀(2xβ sin(δ/2) sinθ)` and
/// the θ integral sits inside the Bose quadrature.
pub fn cf_ezhy_r_with(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
    bose: BoseEval,
) -> Result<CorrelatorSample> {
    guard(delta, config)?;
    let kind = CorrelatorKind::EzHyR;
    let pre = 0.5 * config.beta * config.gamma * delta.sin();
    if pre == 0.0 {
        return Ok(CorrelatorSample::exact(0.0, kind, delta));
    }
    let lag = LagPhase::new(delta, config);
    let r = match bose {
        BoseEval::Closed => sphere(
            |k| Ok((1.0 + k[2] * k[2]) * s_r_eval(lag.big_f_ky(k[1]), bose, spec)?),
            spec,
        )?,
        BoseEval::Integral => {
            let c = 2.0 * config.beta * (0.5 * delta).sin();
            let inner_spec = spec.scaled(0.1);
            try_integrate_bose(
                |x| {
                    let ang = try_integrate_finite(
                        |t| {
                            let (st, ct) = t.sin_cos();
                            Ok(st * (1.0 + ct * ct) * TWO_PI * bessel_i0(c * x * st))
                        },
                        0.0,
                        PI,
                        &inner_spec,
                    )?;
                    Ok(2.0 * x.powi(3) * (x * delta).cosh() * ang.value)
                },
                delta.abs() + c.abs(),
                spec,
            )?
        }
    };
    Ok(CorrelatorSample::from_result(scale(r, pre), kind, delta))
}

fn scale(r: QuadratureResult, factor: f64) -> QuadratureResult {
    QuadratureResult {
        value: r.value * factor,
        abs_error_estimate: r.abs_error_estimate * factor.abs(),
        evaluations: r.evaluations,
    }
}

/// ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ᵣ with the full bracket: `∫do bracket(k̂)·S_r(F)`.
pub fn cf_ezhy_r_unsimplified(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    cf_ezhy_r_unsimplified_with(delta, config, spec, BoseEval::Closed)
}

pub fn cf_ezhy_r_unsimplified_with(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
    bose: BoseEval,
) -> Result<CorrelatorSample> {
    guard(delta, config)?;
    let lag = LagPhase::new(delta, config);
    let r = sphere(
        |k| Ok(bracket_ezhy(k, delta, config) * s_r_eval(lag.big_f_ky(k[1]), bose, spec)?),
        spec,
    )?;
    Ok(CorrelatorSample::from_result(r, CorrelatorKind::EzHyRUnsimplified, delta))
}

/// The k̂_y term that the simplified form drops:
/// `γ sin(δ/2) ∫₀^∞ 2x³ sinh(xδ)/(e^{2πx}−1) ∫do k̂_y sinh(2xβ sin(δ/2) k̂_y)`,
/// evaluated as `−γ sin(δ/2) ∫do k̂_y S_r(F)`.
///
/// `cf_ezhy_r_unsimplified = cf_ezhy_r + cf_ezhy_r_dropped_term` holds
/// identically.
pub fn cf_ezhy_r_dropped_term(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    guard(delta, config)?;
    let lag = LagPhase::new(delta, config);
    let pre = -config.gamma * (0.5 * delta).sin();
    let r = sphere(|k| Ok(k[1] * s_r_eval(lag.big_f_ky(k[1]), BoseEval::Closed, spec)?), spec)?;
    Ok(scale(r, pre))
}

/// ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ᵣ.
///
/// `SmallBeta`: `(4π/3)βγ² sinδ ∫₀^∞ 2t⁴ sinh(tδ)/(e^{2πt}−1) dt`.
/// `General`: `∫do bracket(k̂)·S₁,r(F)` with the full ten-term bracket.
pub fn cf_e3d1e3_r(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
    path: E3d1Path,
) -> Result<CorrelatorSample> {
    cf_e3d1e3_r_with(delta, config, spec, path, BoseEval::Closed)
}

pub fn cf_e3d1e3_r_with(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
    path: E3d1Path,
    bose: BoseEval,
) -> Result<CorrelatorSample> {
    guard(delta, config)?;
    let kind = CorrelatorKind::E3d1E3R;
    match path {
        E3d1Path::SmallBeta => {
            let pre = 4.0 * PI / 3.0 * config.beta * config.gamma * config.gamma * delta.sin();
            if pre == 0.0 {
                return Ok(CorrelatorSample::exact(0.0, kind, delta));
            }
            let t = -s1_r_eval(delta, bose, spec)?;
            Ok(CorrelatorSample::exact(pre * t, kind, delta))
        }
        E3d1Path::General => {
            let lag = LagPhase::new(delta, config);
            let r = sphere(
                |k| Ok(bracket_e3d1e3(k, delta, config) * s1_r_eval(lag.big_f_ky(k[1]), bose, spec)?),
                spec,
            )?;
            Ok(CorrelatorSample::from_result(r, kind, delta))
        }
    }
}

/// ⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩ᵣ: `−γ² ∫do k̂₃²[(1−β²)k̂₁cos(δ/2) + (1+β²)k̂₂sin(δ/2)]·S₁,r(F)`.
pub fn cf_e3d3e1_r(delta: f64, config: &RotationConfig, spec: &QuadratureSpec) -> Result<CorrelatorSample> {
    cf_e3d3e1_r_with(delta, config, spec, BoseEval::Closed)
}

pub fn cf_e3d3e1_r_with(
    delta: f64,
    config: &RotationConfig,
    spec: &QuadratureSpec,
    bose: BoseEval,
) -> Result<CorrelatorSample> {
    guard(delta, config)?;
    let lag = LagPhase::new(delta, config);
    let r = sphere(
        |k| Ok(bracket_e3d3e1(k, delta, config) * s1_r_eval(lag.big_f_ky(k[1]), bose, spec)?),
        spec,
    )?;
    Ok(CorrelatorSample::from_result(r, CorrelatorKind::E3d3E1R, delta))
}

/// `Σ_{n=1}^{N} n³ cos nF`
pub fn mode_sum_cos3(f: f64, n_max: usize) -> f64 {
    (1..=n_max).map(|n| (n as f64).powi(3) * (n as f64 * f).cos()).sum()
}

/// `Σ_{n=1}^{N} n⁴ sin nF`
pub fn mode_sum_sin4(f: f64, n_max: usize) -> f64 {
    (1..=n_max).map(|n| (n as f64).powi(4) * (n as f64 * f).sin()).sum()
}

fn truncated_spec(spec: &QuadratureSpec, n_max: usize) -> QuadratureSpec {
    spec.with_min_panels(spec.min_panels.max(n_max.div_ceil(2)))
}

/// ⟨E⁽ᶻ⁾H⁽ʸ⁾⟩ with the literal harmonic sum `Σ_{n≤N} n³ cos nF`.
pub fn cf_ezhy_d_truncated(
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    let kind = CorrelatorKind::EzHyDTruncated;
    if n_max == 0 {
        return Ok(CorrelatorSample::exact(0.0, kind, delta));
    }
    let lag = LagPhase::new(delta, config);
    let r = sphere(
        |k| Ok(bracket_ezhy(k, delta, config) * mode_sum_cos3(lag.big_f_ky(k[1]), n_max)),
        &truncated_spec(spec, n_max),
    )?;
    Ok(CorrelatorSample::from_result(r, kind, delta))
}

/// ⟨E⁽³⁾∂⁽¹⁾E⁽³⁾⟩ with the literal harmonic sum `Σ_{n≤N} n⁴ sin nF`.
pub fn cf_e3d1e3_d_truncated(
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    let kind = CorrelatorKind::E3d1E3DTruncated;
    if n_max == 0 {
        return Ok(CorrelatorSample::exact(0.0, kind, delta));
    }
    let lag = LagPhase::new(delta, config);
    let r = sphere(
        |k| Ok(bracket_e3d1e3(k, delta, config) * mode_sum_sin4(lag.big_f_ky(k[1]), n_max)),
        &truncated_spec(spec, n_max),
    )?;
    Ok(CorrelatorSample::from_result(r, kind, delta))
}

/// ⟨E⁽³⁾∂⁽³⁾E⁽¹⁾⟩ with the literal harmonic sum, using the same bracket as
/// [`cf_e3d3e1_r`].
pub fn cf_e3d3e1_d_truncated(
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    let kind = CorrelatorKind::E3d3E1DTruncated;
    if n_max == 0 {
        return Ok(CorrelatorSample::exact(0.0, kind, delta));
    }
    let lag = LagPhase::new(delta, config);
    let r = sphere(
        |k| Ok(bracket_e3d3e1(k, delta, config) * mode_sum_sin4(lag.big_f_ky(k[1]), n_max)),
        &truncated_spec(spec, n_max),
    )?;
    Ok(CorrelatorSample::from_result(r, kind, delta))
}

/// The ⟨H E⟩ pairing term `βγ² sinδ ∫do k̂₃² Σ n⁴ sin nF` that a direct phase
/// average adds to [`cf_e3d3e1_d_truncated`].
pub fn e3d3e1_cross_term_truncated(
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let lag = LagPhase::new(delta, config);
    let pre = config.beta * config.gamma * config.gamma * delta.sin();
    let r = sphere(
        |k| Ok(k[2] * k[2] * mode_sum_sin4(lag.big_f_ky(k[1]), n_max)),
        &truncated_spec(spec, n_max),
    )?;
    Ok(scale(r, pre))
}

/// Dispatches on `kind`; `n_max` is used only by the truncated kinds.
pub fn correlator(
    kind: CorrelatorKind,
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSample> {
    match kind {
        CorrelatorKind::EzHyR => cf_ezhy_r(delta, config, spec),
        CorrelatorKind::EzHyRUnsimplified => cf_ezhy_r_unsimplified(delta, config, spec),
        CorrelatorKind::E3d1E3R => cf_e3d1e3_r(delta, config, spec, E3d1Path::SmallBeta),
        CorrelatorKind::E3d3E1R => cf_e3d3e1_r(delta, config, spec),
        CorrelatorKind::EzHyDTruncated => cf_ezhy_d_truncated(delta, config, n_max, spec),
        CorrelatorKind::E3d1E3DTruncated => cf_e3d1e3_d_truncated(delta, config, n_max, spec),
        CorrelatorKind::E3d3E1DTruncated => cf_e3d3e1_d_truncated(delta, config, n_max, spec),
    }
}
