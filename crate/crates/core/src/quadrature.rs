//! Numerical integration shared by the analytic modules.
//!
//! * [`integrate_finite`]: globally adaptive 21-point Gauss–Kronrod on `[a, b]`.
//! * [`integrate_semi_infinite`]: marching panels on `[0, ∞)` for integrands
//!   with exponential decay, with a geometric tail estimate.
//! * [`integrate_bose`]: `∫₀^∞ g(x)/(e^{2πx} − 1) dx` for `g` growing at most
//!   like `cosh(c·x)` with `c < 2π`.
//! * [`integrate_angular`]: `∫₀^π ∫₀^{2π} h(θ, φ) sin θ dφ dθ`.
//!
//! Every routine is deterministic for a fixed [`QuadratureSpec`]: intervals are
//! refined in a fixed order and final sums are taken in ascending abscissa.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Tolerances and budget for a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
    /// Number of equal panels the interval is split into before adaptation.
    pub min_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_evaluations: 1_000_000,
            min_panels: 1,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_min_panels(mut self, panels: usize) -> Self {
        self.min_panels = panels.max(1);
        self
    }

    /// Same tolerances scaled by `factor` (< 1 tightens).
    pub fn scaled(mut self, factor: f64) -> Self {
        self.rel_tol *= factor;
        self.abs_tol *= factor;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_evaluations == 0 {
            return Err(Error::domain("quadrature budget must be at least one evaluation"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_292_617_993,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        resabs: res_abs,
    })
}

/// Globally adaptive Gauss–Kronrod over the given initial break points.
fn adapt<F>(mut f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<(QuadratureResult, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let p = gauss_kronrod(&mut f, w[0], w[1])?;
            evaluations += 21;
            total += p.value;
            total_err += p.error;
            total_abs += p.resabs;
            heap.push(p);
        }
    }

    let tolerance = |total: f64, total_abs: f64| {
        spec.abs_tol
            .max(spec.rel_tol * total.abs())
            .max(100.0 * f64::EPSILON * total_abs)
    };

    while total_err > tolerance(total, total_abs) {
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        if evaluations + 42 > spec.max_evaluations {
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(&mut f, worst.a, mid)?;
        let right = gauss_kronrod(&mut f, mid, worst.b)?;
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
    let result = QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    };
    if error > tolerance(value, resabs) {
        return Err(Error::NonConvergence {
            best: value,
            abs_error: error,
            evaluations,
        });
    }
    Ok((result, resabs))
}

fn equal_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let n = panels.max(1);
    (0..=n)
        .map(|k| {
            if k == n {
                b
            } else {
                a + (b - a) * (k as f64) / (n as f64)
            }
        })
        .collect()
}

/// `∫_a^b f(x) dx` for an infallible integrand.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate_finite(|x| Ok(f(x)), a, b, spec)
}

/// `∫_a^b f(x) dx` for an integrand that can itself fail (nested quadrature).
pub fn try_integrate_finite<F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    adapt(f, &equal_breaks(a, b, spec.min_panels), spec).map(|(r, _)| r)
}

/// `∫ f` over consecutive break points `[p₀, p₁, …, pₖ]`, with each listed
/// sub-interval further split into `spec.min_panels` panels.
pub fn try_integrate_breakpoints<F>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("break points must be increasing"));
    }
    let mut breaks = vec![points[0]];
    for w in points.windows(2) {
        breaks.extend(equal_breaks(w[0], w[1], spec.min_panels).into_iter().skip(1));
    }
    adapt(f, &breaks, spec).map(|(r, _)| r)
}

/// `∫₀^∞ f(x) dx` for an integrand that eventually decays at least like
/// `e^{−decay_rate·x}` (times a polynomial).
///
/// Panels of doubling width are integrated until two consecutive panels
/// shrink and the geometric tail estimate drops below the tolerance. A
/// non-decaying integrand is reported as a domain error.
pub fn integrate_semi_infinite<F>(
    f: F,
    decay_rate: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate_semi_infinite(|x| Ok(f(x)), decay_rate, spec)
}

pub fn try_integrate_semi_infinite<F>(
    mut f: F,
    decay_rate: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(decay_rate.is_finite() && decay_rate > 0.0) {
        return Err(Error::domain(format!(
            "semi-infinite integrand must decay exponentially (rate {decay_rate})"
        )));
    }
    let cap = (4.0 / decay_rate).max(0.5);
    let mut width = 0.5f64.min(cap);
    let mut lo = 0.0;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0usize;
    let mut history: Vec<f64> = Vec::new();
    // Far enough that exp(-decay_rate * x) has underflowed for any sane rate.
    let x_limit = 800.0 / decay_rate + 1e3;

    loop {
        let hi = lo + width;
        let mut panel_spec = *spec;
        panel_spec.max_evaluations = spec.max_evaluations.saturating_sub(evaluations).max(42);
        panel_spec.abs_tol = spec.abs_tol * 0.25;
        let (panel, resabs) = adapt(&mut f, &equal_breaks(lo, hi, spec.min_panels), &panel_spec)?;
        value += panel.value;
        error += panel.abs_error_estimate;
        evaluations += panel.evaluations;
        history.push(resabs);

        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        let k = history.len();
        if k >= 3 {
            let (r0, r1, r2) = (history[k - 3], history[k - 2], history[k - 1]);
            if r2 == 0.0 && r1 == 0.0 {
                break;
            }
            if r2 < r1 && r1 < r0 {
                let ratio = r2 / r1;
                let tail = r2 * ratio / (1.0 - ratio);
                if tail <= 0.1 * target {
                    error += tail;
                    break;
                }
            }
        }
        if hi > x_limit || evaluations >= spec.max_evaluations {
            let decaying = k >= 2 && history[k - 1] < history[k - 2];
            if decaying {
                return Err(Error::NonConvergence {
                    best: value,
                    abs_error: error,
                    evaluations,
                });
            }
            return Err(Error::domain(format!(
                "integrand does not decay on [0, ∞) (last panel |∫| = {:e} at x = {hi})",
                history[k - 1]
            )));
        }
        lo = hi;
        width = (2.0 * width).min(cap);
    }

    let target = spec.abs_tol.max(spec.rel_tol * value.abs());
    if error > target.max(100.0 * f64::EPSILON * value.abs()) * 10.0 {
        return Err(Error::NonConvergence {
            best: value,
            abs_error: error,
            evaluations,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    })
}

/// Planck/Bose weight `1/(e^{2πx} − 1)`, stable near `x = 0`.
pub fn bose_weight(x: f64) -> f64 {
    1.0 / (TWO_PI * x).exp_m1()
}

/// `∫₀^∞ g(x)/(e^{2πx} − 1) dx`.
///
/// `growth` is an upper bound `c` on the exponential growth of `g`
/// (`|g(x)| ≲ xᵏ cosh(c·x)`). The integral diverges for `c ≥ 2π`.
pub fn integrate_bose<F>(g: F, growth: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    try_integrate_bose(|x| Ok(g(x)), growth, spec)
}

pub fn try_integrate_bose<F>(mut g: F, growth: f64, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_bose_growth(growth)?;
    try_integrate_semi_infinite(
        |x| {
            let w = bose_weight(x);
            if w == 0.0 {
                Ok(0.0)
            } else {
                Ok(g(x)? * w)
            }
        },
        TWO_PI - growth.abs(),
        spec,
    )
}

pub(crate) fn check_bose_growth(growth: f64) -> Result<()> {
    if !growth.is_finite() || growth.abs() >= TWO_PI {
        return Err(Error::domain(format!(
            "Bose integral diverges: growth rate {growth} is not below 2π"
        )));
    }
    Ok(())
}

/// `∫₀^π dθ sin θ ∫₀^{2π} dφ h(θ, φ)`.
pub fn integrate_angular<H>(h: H, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    H: Fn(f64, f64) -> f64,
{
    try_integrate_angular(|t, p| Ok(h(t, p)), spec)
}

pub fn try_integrate_angular<H>(mut h: H, spec: &QuadratureSpec) -> Result<QuadratureResult>
where
    H: FnMut(f64, f64) -> Result<f64>,
{
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let mut inner_spec = *spec;
    inner_spec.abs_tol = spec.abs_tol * 0.1;
    let mut outer_spec = *spec;
    outer_spec.min_panels = spec.min_panels.max(2);
    let outer = try_integrate_finite(
        |theta| {
            let st = theta.sin();
            let r = try_integrate_finite(|phi| h(theta, phi), 0.0, TWO_PI, &inner_spec)?;
            inner_evals.set(inner_evals.get() + r.evaluations);
            inner_err.set(inner_err.get().max(r.abs_error_estimate));
            Ok(st * r.value)
        },
        0.0,
        PI,
        &outer_spec,
    )?;
    Ok(QuadratureResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate + 2.0 * inner_err.get(),
        evaluations: inner_evals.get().max(outer.evaluations),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let nf = n as f64;
    let d = nf * (x * p - p0) / (x * x - 1.0);
    (p, d)
}
