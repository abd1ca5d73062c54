//! Frequency response of the radiation-damped dipole oscillator.
//!
//! Harmonic `n` is driven at `ωₙ = Ω₀γn`. Its response carries the
//! denominator
//!
//! `√[(1 − ω₀²/ωₙ²)² + Γ²ωₙ²(1 + a²/(ωₙ²c²))²]`
//!
//! and the phase `φₙ`. Selectivity functions are reported in units of
//! `1/(Ω₀γ)` (for `f_d`) and `1/(Ω₀γ)²` (for `f₁,d`), with `δ = Ω₀γ(τ₂ − τ₁)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::RotationConfig;

/// Below this ω₀/Ω₀ the free-particle form of `f_d` is used.
pub const FREE_PARTICLE_THRESHOLD: f64 = 1e-6;

/// Default harmonic cutoff for the selectivity series.
pub const DEFAULT_N_MAX: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicResponse {
    pub n: u32,
    pub denom: f64,
    pub sin_phi: f64,
    pub cos_phi: f64,
}

impl HarmonicResponse {
    pub fn phi(&self) -> f64 {
        self.sin_phi.atan2(self.cos_phi)
    }
}

/// Response of harmonic `n ≥ 1`.
pub fn harmonic_response(n: u32, config: &RotationConfig) -> Result<HarmonicResponse> {
    if n == 0 {
        return Err(Error::domain("harmonic index must be at least 1"));
    }
    let nf = f64::from(n);
    let ratio = config.omega0_ratio / (config.gamma * nf);
    let detune = 1.0 - ratio * ratio;
    let damp = config.damping() * nf * (1.0 + config.accel_group(n));
    let denom = detune.hypot(damp);
    Ok(HarmonicResponse {
        n,
        denom,
        sin_phi: detune / denom,
        cos_phi: damp / denom,
    })
}

/// `f_d·Ω₀γ = 2 Σₙ (1/n) cos(−nδ + φₙ)/denomₙ`, truncated at `n_max`.
///
/// For ω₀/Ω₀ below [`FREE_PARTICLE_THRESHOLD`] the free-particle form
/// `2 Σ (1/n)(nG cos nδ + sin nδ)/(1 + G²n²(1 + β²γ²/n²)²)` is used, with
/// `G = ΓΩ₀γ`.
pub fn selectivity_fd(delta: f64, config: &RotationConfig, n_max: usize) -> f64 {
    if config.omega0_ratio < FREE_PARTICLE_THRESHOLD {
        selectivity_fd_free(delta, config, n_max)
    } else {
        selectivity_fd_general(delta, config, n_max)
    }
}

/// [`selectivity_fd`] from the phase/denominator form at every ω₀.
pub fn selectivity_fd_general(delta: f64, config: &RotationConfig, n_max: usize) -> f64 {
    let mut sum = 0.0;
    for n in (1..=n_max as u32).rev() {
        let h = harmonic_response(n, config).expect("n >= 1");
        let nf = f64::from(n);
        let (s, c) = (nf * delta).sin_cos();
        // cos(−nδ + φ) = cos nδ cos φ + sin nδ sin φ
        sum += (c * h.cos_phi + s * h.sin_phi) / (nf * h.denom);
    }
    2.0 * sum
}

/// The free-particle (ω₀ = 0) closed series.
pub fn selectivity_fd_free(delta: f64, config: &RotationConfig, n_max: usize) -> f64 {
    let g = config.damping();
    let mut sum = 0.0;
    for n in (1..=n_max as u32).rev() {
        let nf = f64::from(n);
        let corr = 1.0 + config.accel_group(n);
        let (s, c) = (nf * delta).sin_cos();
        sum += (nf * g * c + s) / (nf * (1.0 + (g * nf * corr).powi(2)));
    }
    2.0 * sum
}

/// `f₁,d·(Ω₀γ)² = −2 Σₙ (1/n²) sin(−nδ + φₙ)/denomₙ`.
pub fn selectivity_f1d(delta: f64, config: &RotationConfig, n_max: usize) -> f64 {
    let mut sum = 0.0;
    for n in (1..=n_max as u32).rev() {
        sum += f1d_term(n, delta, config);
    }
    -2.0 * sum
}

/// Single harmonic of [`selectivity_fd_general`] (without the factor 2).
pub fn fd_term(n: u32, delta: f64, config: &RotationConfig) -> f64 {
    let h = harmonic_response(n, config).expect("n >= 1");
    let nf = f64::from(n);
    (h.phi() - nf * delta).cos() / (nf * h.denom)
}

/// Single harmonic of [`selectivity_f1d`] (without the factor −2).
pub fn f1d_term(n: u32, delta: f64, config: &RotationConfig) -> f64 {
    let h = harmonic_response(n, config).expect("n >= 1");
    let nf = f64::from(n);
    let (s, c) = (nf * delta).sin_cos();
    // sin(−nδ + φ) = sin φ cos nδ − cos φ sin nδ
    (h.sin_phi * c - h.cos_phi * s) / (nf * nf * h.denom)
}

/// Bound on `Σ_{n > n_max}` of the `f_d` series: `2/(G·n_max)`.
pub fn fd_tail_bound(config: &RotationConfig, n_max: usize) -> f64 {
    2.0 / (config.damping() * n_max.max(1) as f64)
}

/// Bound on `Σ_{n > n_max}` of the `f₁,d` series: `1/(G·n_max²)`.
pub fn f1d_tail_bound(config: &RotationConfig, n_max: usize) -> f64 {
    let n = n_max.max(1) as f64;
    1.0 / (config.damping() * n * n)
}

/// Time-domain check of a single driven harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleOracleReport {
    /// Largest |ż_numeric − ż_formula| over the final period.
    pub max_abs_diff: f64,
    /// Amplitude of the formula's steady-state ż.
    pub amplitude: f64,
}

impl DipoleOracleReport {
    pub fn relative_error(&self) -> f64 {
        self.max_abs_diff / self.amplitude
    }
}

/// Integrates `z̈ + ω₀²z = E₀cos(ωₙτ) + Γ(d³z/dτ³ − a²ż)` with RK4 and
/// compares the late-time velocity with `E₀ cos(ωₙτ − φₙ)/(ωₙ·denomₙ)`.
///
/// Time is measured in units of `1/(Ω₀γ)`. The third derivative uses the
/// monochromatic order reduction `d³z/dτ³ → −ωₙ² ż`, which keeps the
/// equation second order and free of runaway solutions.
pub fn dipole_response_oracle(
    n: u32,
    config: &RotationConfig,
    steps_per_period: usize,
) -> Result<DipoleOracleReport> {
    let h = harmonic_response(n, config)?;
    let omega = f64::from(n);
    let w0 = config.omega0_ratio / config.gamma;
    let a2 = (config.beta * config.gamma).powi(2);
    let damping = config.damping() * (omega * omega + a2);
    let e0 = 1.0;

    let rhs = |t: f64, z: f64, v: f64| e0 * (omega * t).cos() - w0 * w0 * z - damping * v;
    let period = std::f64::consts::TAU / omega;
    let dt = period / steps_per_period.max(16) as f64;
    let settle = 40.0 / damping + 4.0 * period;
    let settle_steps = (settle / dt).ceil() as usize;

    let (mut t, mut z, mut v) = (0.0, 0.0, 0.0);
    let step = |t: f64, z: f64, v: f64| {
        let k1z = v;
        let k1v = rhs(t, z, v);
        let k2z = v + 0.5 * dt * k1v;
        let k2v = rhs(t + 0.5 * dt, z + 0.5 * dt * k1z, v + 0.5 * dt * k1v);
        let k3z = v + 0.5 * dt * k2v;
        let k3v = rhs(t + 0.5 * dt, z + 0.5 * dt * k2z, v + 0.5 * dt * k2v);
        let k4z = v + dt * k3v;
        let k4v = rhs(t + dt, z + dt * k3z, v + dt * k3v);
        (
            z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
            v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    };
    for k in 0..settle_steps {
        (z, v) = step(t, z, v);
        t = (k + 1) as f64 * dt;
    }

    let amplitude = e0 / (omega * h.denom);
    let phi = h.phi();
    let mut max_abs_diff: f64 = 0.0;
    for k in 0..steps_per_period {
        let expected = amplitude * (omega * t - phi).cos();
        max_abs_diff = max_abs_diff.max((v - expected).abs());
        (z, v) = step(t, z, v);
        t = (settle_steps + k + 1) as f64 * dt;
    }
    Ok(DipoleOracleReport {
        max_abs_diff,
        amplitude,
    })
}

/// Complex steady-state velocity amplitude `−iωₙ/D` with
/// `D = ω₀² − ωₙ² − iωₙΓ(ωₙ² + a²)`, in units where `Ω₀γ = 1`.
pub fn velocity_transfer(n: u32, config: &RotationConfig) -> Complex64 {
    let omega = f64::from(n);
    let w0 = config.omega0_ratio / config.gamma;
    let a2 = (config.beta * config.gamma).powi(2);
    let d = Complex64::new(w0 * w0 - omega * omega, -omega * config.damping() * (omega * omega + a2));
    Complex64::new(0.0, -omega) / d
}
