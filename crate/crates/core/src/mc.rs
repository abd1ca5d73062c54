//! Monte Carlo oracle for the truncated correlators.
//!
//! The discrete field is a superposition of plane waves `k = n·k̂ⱼ` on a fixed
//! angular node set, two polarizations per node and one uniform random phase
//! per (n, node, polarization). In units Ω₀ = c = 1 a mode reads
//!
//! `E = Aₙⱼ ε̂ cos(n(k̂·r − t) − Θ)`, `H = k̂ × E`, `Aₙⱼ = √(2n³wⱼ)`,
//!
//! so that phase-averaged products reproduce `∫do (…) Σₙ n³ cos nF` with the
//! node weights standing in for the solid-angle integral. Gradient
//! correlators use the same normalization with one extra power of n.
//!
//! The oscillator sits at `r = β(cos t, sin t, 0)`. The first field of each
//! product is taken at `t₁` and the second, with any derivative, at `t₁ + δ`.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{to_instantaneous_frame, FieldTriple, Vec3};
use crate::params::RotationConfig;
use crate::quadrature::GaussLegendre;

const TWO_PI: f64 = 2.0 * PI;

/// Product-form angular rule: Gauss–Legendre in cos θ times the midpoint
/// rule in φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRule {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl NodeRule {
    /// Resolution adequate for harmonics up to `n_max` at moderate β.
    pub fn for_n_max(n_max: usize) -> Self {
        let n_theta = 16 + 2 * n_max;
        Self {
            n_theta,
            n_phi: 2 * n_theta,
        }
    }

    pub fn doubled(self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_phi: 2 * self.n_phi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta == 0 || self.n_phi == 0 {
            return Err(Error::domain(format!(
                "node rule needs at least one node per axis, got {}×{}",
                self.n_theta, self.n_phi
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ, φ, weight)` triples; weights sum to 4π.
    pub fn nodes(&self) -> Result<Vec<(f64, f64, f64)>> {
        self.validate()?;
        let gl = GaussLegendre::new(self.n_theta);
        let dphi = TWO_PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.len());
        for (x, wx) in gl.on(-1.0, 1.0) {
            let theta = x.acos();
            for j in 0..self.n_phi {
                out.push((theta, (j as f64 + 0.5) * dphi, wx * dphi));
            }
        }
        Ok(out)
    }
}

/// One angular node with its wave direction and polarization pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
    pub k: Vec3,
    pub eps: [Vec3; 2],
}

impl ModeNode {
    fn new(theta: f64, phi: f64, weight: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            theta,
            phi,
            weight,
            k: [st * cp, st * sp, ct],
            eps: [[ct * cp, ct * sp, -st], [-sp, cp, 0.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRealization {
    pub n_max: usize,
    pub nodes: Vec<ModeNode>,
    /// Phases indexed `((n − 1)·nodes + j)·2 + λ`.
    pub phases: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl ModeRealization {
    pub fn phase(&self, n: usize, node: usize, pol: usize) -> f64 {
        self.phases[((n - 1) * self.nodes.len() + node) * 2 + pol]
    }
}

fn build_nodes(rule: &NodeRule) -> Result<Vec<ModeNode>> {
    Ok(rule
        .nodes()?
        .into_iter()
        .map(|(t, p, w)| ModeNode::new(t, p, w))
        .collect())
}

/// The RNG for realization `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_realization(n_max: usize, rule: &NodeRule, seed: u64) -> Result<ModeRealization> {
    sample_realization_stream(n_max, rule, seed, 0)
}

pub fn sample_realization_stream(
    n_max: usize,
    rule: &NodeRule,
    seed: u64,
    stream: u64,
) -> Result<ModeRealization> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let nodes = build_nodes(rule)?;
    Ok(realize(n_max, nodes, seed, stream))
}

fn realize(n_max: usize, nodes: Vec<ModeNode>, seed: u64, stream: u64) -> ModeRealization {
    let mut rng = rng_for(seed, stream);
    let phases = (0..n_max * nodes.len() * 2)
        .map(|_| rng.random_range(0.0..TWO_PI))
        .collect();
    ModeRealization {
        n_max,
        nodes,
        phases,
        seed,
        stream,
    }
}

/// Lab fields and their spatial gradients at one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub fields: FieldTriple,
    /// `grad[l]` holds `∂E/∂xˡ` and `∂H/∂xˡ`.
    pub grad: [FieldTriple; 3],
}

/// Lab fields and gradients at point `r` and lab time `t` (units Ω₀ = c = 1).
pub fn fields_at(realization: &ModeRealization, r: Vec3, t: f64) -> FieldSample {
    accumulate(realization, r, t, true)
}

fn accumulate(realization: &ModeRealization, r: Vec3, t: f64, with_grad: bool) -> FieldSample {
    let mut e = [0.0; 3];
    let mut h = [0.0; 3];
    let mut ge = [[0.0; 3]; 3];
    let mut gh = [[0.0; 3]; 3];
    for (j, node) in realization.nodes.iter().enumerate() {
        let k = node.k;
        let kr = k[0] * r[0] + k[1] * r[1] + k[2] * r[2] - t;
        let hs = [
            crate::kinematics::cross3(&k, &node.eps[0]),
            crate::kinematics::cross3(&k, &node.eps[1]),
        ];
        for n in 1..=realization.n_max {
            let nf = n as f64;
            let amp = (2.0 * nf.powi(3) * node.weight).sqrt();
            for pol in 0..2 {
                let (sn, cs) = (nf * kr - realization.phase(n, j, pol)).sin_cos();
                let ec = amp * cs;
                let es = -amp * nf * sn;
                for m in 0..3 {
                    e[m] += ec * node.eps[pol][m];
                    h[m] += ec * hs[pol][m];
                    if !with_grad {
                        continue;
                    }
                    for l in 0..3 {
                        ge[l][m] += es * k[l] * node.eps[pol][m];
                        gh[l][m] += es * k[l] * hs[pol][m];
                    }
                }
            }
        }
    }
    FieldSample {
        fields: FieldTriple::new(e, h),
        grad: [0, 1, 2].map(|l| FieldTriple::new(ge[l], gh[l])),
    }
}

/// Orbit position at lab phase `t`.
pub fn orbit_position(t: f64, config: &RotationConfig) -> Vec3 {
    [config.beta * t.cos(), config.beta * t.sin(), 0.0]
}

/// Fields and gradients at the oscillator centre at lab phase `t`.
pub fn fields_on_trajectory(realization: &ModeRealization, t: f64, config: &RotationConfig) -> FieldSample {
    fields_at(realization, orbit_position(t, config), t)
}

/// Instantaneous-frame fields and radial/axial derivatives at lab phase `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSample {
    pub fields: FieldTriple,
    /// ∂⁽¹⁾ of the frame fields.
    pub d1: FieldTriple,
    /// ∂⁽³⁾ of the frame fields.
    pub d3: FieldTriple,
}

/// Spatial directions transverse to the velocity are unchanged by the boost,
/// so ∂⁽¹⁾ = cos t ∂ₓ + sin t ∂ᵧ and ∂⁽³⁾ = ∂_z act on the transformed fields.
pub fn frame_sample(lab: &FieldSample, t: f64, config: &RotationConfig) -> FrameSample {
    let (s, c) = t.sin_cos();
    let tr = |f: &FieldTriple| to_instantaneous_frame(f, t, config);
    let gx = tr(&lab.grad[0]);
    let gy = tr(&lab.grad[1]);
    let radial = FieldTriple::new(
        [0, 1, 2].map(|m| c * gx.e[m] + s * gy.e[m]),
        [0, 1, 2].map(|m| c * gx.h[m] + s * gy.h[m]),
    );
    FrameSample {
        fields: tr(&lab.fields),
        d1: radial,
        d3: tr(&lab.grad[2]),
    }
}

/// Products estimated by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// E⁽³⁾(t₁)·H⁽²⁾(t₁+δ)
    EzHy,
    /// E⁽³⁾(t₁)·∂⁽¹⁾E⁽³⁾(t₁+δ)
    E3d1E3,
    /// E⁽³⁾(t₁)·∂⁽³⁾E⁽¹⁾(t₁+δ)
    E3d3E1,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::EzHy => "EzHy",
            Observable::E3d1E3 => "E3d1E3",
            Observable::E3d3E1 => "E3d3E1",
        }
    }

    fn pick(self, first: &FrameSample, second: &FrameSample) -> f64 {
        let e3 = first.fields.e[2];
        match self {
            Observable::EzHy => e3 * second.fields.h[1],
            Observable::E3d1E3 => e3 * second.d1.e[2],
            Observable::E3d3E1 => e3 * second.d3.e[0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl EnsembleEstimate {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::domain("an ensemble estimate needs at least two samples"));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n_samples: n,
        })
    }

    /// |self − value| in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub rule: NodeRule,
    /// Lab phase t₁ of the first field.
    pub t1: f64,
}

impl McOptions {
    pub fn for_n_max(n_max: usize) -> Self {
        Self {
            rule: NodeRule::for_n_max(n_max),
            t1: 0.0,
        }
    }
}

pub fn estimate_correlator(
    observable: Observable,
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<EnsembleEstimate> {
    estimate_correlator_with(observable, delta, config, n_max, n_samples, seed, &McOptions::for_n_max(n_max))
}

/// Realization `i` draws from stream `i` of `seed`; samples are reduced in
/// index order, so the result does not depend on the thread count.
pub fn estimate_correlator_with(
    observable: Observable,
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    n_samples: usize,
    seed: u64,
    options: &McOptions,
) -> Result<EnsembleEstimate> {
    if n_samples < 2 {
        return Err(Error::domain("n_samples must be at least 2"));
    }
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let nodes = build_nodes(&options.rule)?;
    let (t1, t2) = (options.t1, options.t1 + delta);
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let real = realize(n_max, nodes.clone(), seed, i);
            let at = |t: f64, grad: bool| {
                let lab = accumulate(&real, orbit_position(t, config), t, grad);
                frame_sample(&lab, t, config)
            };
            let a = at(t1, false);
            let b = at(t2, observable != Observable::EzHy);
            observable.pick(&a, &b)
        })
        .collect();
    EnsembleEstimate::from_samples(&values)
}

/// Complex amplitude of a frame quantity for a single mode, so that the real
/// field is `Re[a·e^{−iΘ}]`.
#[derive(Clone, Copy)]
struct ModeAmplitudes {
    e3: num_complex::Complex64,
    h2: num_complex::Complex64,
    d1e3: num_complex::Complex64,
    d3e1: num_complex::Complex64,
}

fn mode_amplitudes(node: &ModeNode, pol: usize, n: usize, t: f64, config: &RotationConfig) -> ModeAmplitudes {
    use num_complex::Complex64;
    let nf = n as f64;
    let r = orbit_position(t, config);
    let k = node.k;
    let amp = (2.0 * nf.powi(3) * node.weight).sqrt();
    let phase = Complex64::from_polar(amp, nf * (k[0] * r[0] + k[1] * r[1] + k[2] * r[2] - t));
    let eps = node.eps[pol];
    let h = crate::kinematics::cross3(&k, &eps);
    let (s, c) = t.sin_cos();
    let g = config.gamma;
    let bg = config.beta * g;
    let e3 = (g * eps[2] - bg * (h[0] * c + h[1] * s)) * phase;
    let e1 = (g * (eps[0] * c + eps[1] * s) + bg * h[2]) * phase;
    let h2 = (-h[0] * s + h[1] * c) * phase;
    let i_n = Complex64::new(0.0, nf);
    ModeAmplitudes {
        e3,
        h2,
        d1e3: i_n * (k[0] * c + k[1] * s) * e3,
        d3e1: i_n * k[2] * e1,
    }
}

/// The ensemble mean in closed form: `Σ ½ Re[a(t₁)·conj(b(t₁+δ))]` over modes.
pub fn exact_phase_average(
    observable: Observable,
    delta: f64,
    config: &RotationConfig,
    n_max: usize,
    options: &McOptions,
) -> Result<f64> {
    let nodes = build_nodes(&options.rule)?;
    let (t1, t2) = (options.t1, options.t1 + delta);
    let mut total = 0.0;
    for node in &nodes {
        for n in 1..=n_max {
            for pol in 0..2 {
                let a = mode_amplitudes(node, pol, n, t1, config);
                let b = mode_amplitudes(node, pol, n, t2, config);
                let y = match observable {
                    Observable::EzHy => b.h2,
                    Observable::E3d1E3 => b.d1e3,
                    Observable::E3d3E1 => b.d3e1,
                };
                total += 0.5 * (a.e3 * y.conj()).re;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{
        cf_e3d1e3_d_truncated, cf_e3d3e1_d_truncated, cf_ezhy_d_truncated, e3d3e1_cross_term_truncated,
    };
    use crate::kinematics::dot3;
    use crate::params::make_config;
    use crate::quadrature::QuadratureSpec;

    fn cfg(beta: f64) -> RotationConfig {
        make_config(beta, 1.0, 0.0, 1.0 / 137.04).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn node_weights_cover_sphere() {
        let nodes = NodeRule::for_n_max(3).nodes().unwrap();
        let total: f64 = nodes.iter().map(|n| n.2).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        assert!(NodeRule { n_theta: 0, n_phi: 4 }.nodes().is_err());
    }

    #[test]
    fn polarizations_are_orthonormal_and_transverse() {
        let real = sample_realization(2, &NodeRule::for_n_max(2), 1).unwrap();
        for node in &real.nodes {
            let [a, b] = node.eps;
            assert!(dot3(&a, &node.k).abs() < 1e-12);
            assert!(dot3(&b, &node.k).abs() < 1e-12);
            assert!(dot3(&a, &b).abs() < 1e-12);
            assert!((dot3(&a, &a) - 1.0).abs() < 1e-12);
            assert!((dot3(&b, &b) - 1.0).abs() < 1e-12);
            assert!((dot3(&node.k, &node.k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let rule = NodeRule::for_n_max(2);
        let a = sample_realization(2, &rule, 99).unwrap();
        let b = sample_realization(2, &rule, 99).unwrap();
        let c = sample_realization(2, &rule, 100).unwrap();
        assert_eq!(a.phases, b.phases);
        assert_ne!(a.phases, c.phases);
    }

    #[test]
    fn phases_are_uniform() {
        // Kolmogorov–Smirnov against U[0, 2π) at the 1% level.
        let rule = NodeRule { n_theta: 50, n_phi: 100 };
        let real = sample_realization(10, &rule, 7).unwrap();
        let mut u: Vec<f64> = real.phases.iter().map(|p| p / TWO_PI).collect();
        assert_eq!(u.len(), 100_000);
        assert!(u.iter().all(|&x| (0.0..1.0).contains(&x)));
        u.sort_by(f64::total_cmp);
        let n = u.len() as f64;
        let d = u
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
            .fold(0.0, f64::max);
        assert!(d < 1.628 / n.sqrt(), "D = {d}");
    }

    #[test]
    fn single_mode_at_rest_is_plane_wave() {
        let rule = NodeRule { n_theta: 1, n_phi: 1 };
        let real = sample_realization(1, &rule, 3).unwrap();
        let node = real.nodes[0];
        let lab = fields_on_trajectory(&real, 0.4, &cfg(0.0));
        let amp = (2.0 * node.weight).sqrt();
        for m in 0..3 {
            let want: f64 = (0..2)
                .map(|p| amp * (-0.4 - real.phase(1, 0, p)).cos() * node.eps[p][m])
                .sum();
            assert!((lab.fields.e[m] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fields_are_divergence_free() {
        let real = sample_realization(3, &NodeRule::for_n_max(3), 11).unwrap();
        let r = [0.03, -0.02, 0.01];
        let lab = fields_at(&real, r, 0.7);
        let analytic: f64 = (0..3).map(|l| lab.grad[l].e[l]).sum();
        let scale = lab.grad.iter().map(|g| g.e.iter().map(|v| v.abs()).sum::<f64>()).sum::<f64>();
        assert!(analytic.abs() < 1e-10 * scale);
        // Central differences agree with the analytic gradient.
        let h = 1e-5;
        let mut fd = 0.0;
        for l in 0..3 {
            let mut rp = r;
            let mut rm = r;
            rp[l] += h;
            rm[l] -= h;
            let d = (fields_at(&real, rp, 0.7).fields.e[l] - fields_at(&real, rm, 0.7).fields.e[l]) / (2.0 * h);
            assert!((d - lab.grad[l].e[l]).abs() < 1e-6 * scale);
            fd += d;
        }
        assert!(fd.abs() < 1e-6 * scale);
    }

    #[test]
    fn fields_are_periodic() {
        let c = cfg(0.1);
        let real = sample_realization(4, &NodeRule::for_n_max(4), 5).unwrap();
        let a = fields_on_trajectory(&real, 0.3, &c);
        let b = fields_on_trajectory(&real, 0.3 + TWO_PI, &c);
        for m in 0..3 {
            assert!((a.fields.e[m] - b.fields.e[m]).abs() < 1e-10);
            assert!((a.fields.h[m] - b.fields.h[m]).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_average_matches_truncated_correlators() {
        let c = cfg(0.1);
        let spec = QuadratureSpec::default();
        let opts = McOptions { t1: 0.37, ..McOptions::for_n_max(5) };
        let ez = exact_phase_average(Observable::EzHy, 1.0, &c, 5, &opts).unwrap();
        let ez_ref = cf_ezhy_d_truncated(1.0, &c, 5, &spec).unwrap().value;
        assert!(rel(ez, ez_ref) < 1e-9, "{ez} vs {ez_ref}");
        let g1 = exact_phase_average(Observable::E3d1E3, 1.0, &c, 5, &opts).unwrap();
        let g1_ref = cf_e3d1e3_d_truncated(1.0, &c, 5, &spec).unwrap().value;
        assert!(rel(g1, g1_ref) < 1e-9, "{g1} vs {g1_ref}");
        // The printed bracket of the third correlator omits the ⟨H E⟩ pairing.
        let g3 = exact_phase_average(Observable::E3d3E1, 1.0, &c, 5, &opts).unwrap();
        let g3_ref = cf_e3d3e1_d_truncated(1.0, &c, 5, &spec).unwrap().value
            + e3d3e1_cross_term_truncated(1.0, &c, 5, &spec).unwrap().value;
        assert!(rel(g3, g3_ref) < 1e-9, "{g3} vs {g3_ref}");
    }

    #[test]
    fn node_refinement_converges() {
        let c = cfg(0.1);
        let opts = McOptions::for_n_max(3);
        let fine = McOptions { rule: opts.rule.doubled(), ..opts };
        let a = exact_phase_average(Observable::EzHy, 0.8, &c, 3, &opts).unwrap();
        let b = exact_phase_average(Observable::EzHy, 0.8, &c, 3, &fine).unwrap();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn ensemble_matches_exact_average() {
        let c = cfg(0.1);
        let est = estimate_correlator(Observable::EzHy, 1.0, &c, 2, 2000, 42).unwrap();
        let exact = exact_phase_average(Observable::EzHy, 1.0, &c, 2, &McOptions::for_n_max(2)).unwrap();
        assert!(est.z_score(exact) < 3.0, "{est:?} vs {exact}");
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn ensemble_is_deterministic() {
        let c = cfg(0.05);
        let a = estimate_correlator(Observable::E3d1E3, 0.5, &c, 2, 64, 9).unwrap();
        let b = estimate_correlator(Observable::E3d1E3, 0.5, &c, 2, 64, 9).unwrap();
        assert_eq!(a, b);
        assert!(estimate_correlator(Observable::EzHy, 0.5, &c, 2, 1, 9).is_err());
    }

    #[test]
    fn linear_averages_vanish() {
        let c = cfg(0.1);
        let rule = NodeRule::for_n_max(2);
        let samples: Vec<FieldTriple> = (0..800)
            .map(|i| fields_on_trajectory(&sample_realization_stream(2, &rule, 5, i).unwrap(), 0.2, &c).fields)
            .collect();
        for m in 0..3 {
            let e: Vec<f64> = samples.iter().map(|s| s.e[m]).collect();
            let h: Vec<f64> = samples.iter().map(|s| s.h[m]).collect();
            assert!(EnsembleEstimate::from_samples(&e).unwrap().z_score(0.0) < 3.5);
            assert!(EnsembleEstimate::from_samples(&h).unwrap().z_score(0.0) < 3.5);
        }
    }

    #[test]
    fn distinct_phases_are_uncorrelated() {
        let mut rng = rng_for(17, 0);
        let prods: Vec<f64> = (0..20_000)
            .map(|_| {
                let a: f64 = rng.random_range(0.0..TWO_PI);
                let b: f64 = rng.random_range(0.0..TWO_PI);
                a.cos() * b.cos()
            })
            .collect();
        assert!(EnsembleEstimate::from_samples(&prods).unwrap().z_score(0.0) < 3.0);
        let diag: Vec<f64> = (0..20_000)
            .map(|_| rng.random_range(0.0..TWO_PI).cos().powi(2))
            .collect();
        assert!(EnsembleEstimate::from_samples(&diag).unwrap().z_score(0.5) < 3.0);
    }

    #[test]
    fn variance_scales_inversely() {
        let c = cfg(0.1);
        let opts = McOptions {
            rule: NodeRule { n_theta: 8, n_phi: 16 },
            t1: 0.0,
        };
        let sizes = [500usize, 2000, 8000];
        let pts: Vec<(f64, f64)> = sizes
            .iter()
            .map(|&n| {
                let e = estimate_correlator_with(Observable::EzHy, 1.0, &c, 2, n, 3, &opts).unwrap();
                ((n as f64).ln(), (e.std_error * e.std_error).ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
    }
}
