//! Acceptance checks shared by the CLI `verify` command and the test suite.
//!
//! Each check is a list of [`Comparison`]s against pinned constants and
//! tolerances. A check passes when every comparison does.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlators::{cf_ezhy_d_truncated, cf_ezhy_r, cf_ezhy_r_unsimplified};
use crate::error::Result;
use crate::forces::{
    force_grad2_quadrature, Assembly, force_total_smallbeta, integral_i1_n, integral_i1_n_quadrature, integral_j1_n,
    integral_jtilde_n, integral_x_n, DEFAULT_N_MAX,
};
use crate::kinematics::{four_velocity_check, tetrad_at, to_instantaneous_frame, FieldTriple};
use crate::mc::{estimate_correlator_with, McOptions, Observable};
use crate::params::{make_config, RotationConfig, DEFAULT_INV_ALPHA};
use crate::quadrature::QuadratureSpec;
use crate::regularization::{
    s_c_closed, s_d_partial_fractions, s_r_closed, s_r_integral, s1_r_integral, DEFAULT_PARTIAL_FRACTION_TERMS,
};
use crate::selfconsistency::{closed_form_w, solve_orbit};

/// Published J̃ₙ, n = 1..6.
pub const JTILDE_PUBLISHED: [f64; 6] = [0.143823, 0.0317016, 0.00867892, 0.0031658, 0.00139711, 0.000703877];
/// Published R/(r_cl β).
pub const ORBIT_RATIO_PUBLISHED: f64 = 0.665243;
/// Published small-F slope of S₁,ᵣ, −15/(16·945).
pub const S1R_SLOPE_PUBLISHED: f64 = -15.0 / (16.0 * 945.0);
/// Full-precision regression values.
pub const X1_FROZEN: f64 = 0.013020384859254332;
pub const COMPONENTS_1_FROZEN: f64 = 0.09174154944465301;

pub const CHECK_NAMES: [&str; 12] = [
    "s_r_limit",
    "representation_equivalence",
    "s1r_slope",
    "x1_coefficient",
    "jtilde_table",
    "i1_closed_form",
    "f2_null",
    "orbit_ratio",
    "simplified_correlator_equivalence",
    "tetrad_invariants",
    "mc_concordance",
    "assembly_gap",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub spec: QuadratureSpec,
    pub seed: u64,
    pub mc_samples: usize,
    /// Test hook: name of a check whose first expected constant is corrupted.
    pub fault: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            spec: QuadratureSpec::default(),
            seed: 20_240_601,
            mc_samples: 10_000,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// |measured − expected| ≤ tolerance
    Absolute,
    /// |measured − expected| ≤ tolerance·|expected|
    Relative,
    /// measured ≤ tolerance; `expected` holds the bound
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub kind: ComparisonKind,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub deviation: f64,
    pub passed: bool,
}

impl Comparison {
    fn new(label: impl Into<String>, kind: ComparisonKind, measured: f64, expected: f64, tolerance: f64) -> Self {
        let deviation = match kind {
            ComparisonKind::Absolute => (measured - expected).abs(),
            ComparisonKind::Relative => (measured - expected).abs() / expected.abs(),
            ComparisonKind::AtMost => measured,
        };
        Self {
            label: label.into(),
            kind,
            measured,
            expected,
            tolerance,
            deviation,
            passed: deviation.is_finite() && deviation <= tolerance,
        }
    }

    fn abs(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(label, ComparisonKind::Absolute, measured, expected, tolerance)
    }

    fn rel(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(label, ComparisonKind::Relative, measured, expected, tolerance)
    }

    fn at_most(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(label, ComparisonKind::AtMost, measured, bound, bound)
    }

    fn corrupted(&self) -> Self {
        match self.kind {
            ComparisonKind::AtMost => Self::at_most(self.label.clone(), self.measured + 1.0, self.tolerance),
            kind => Self::new(
                self.label.clone(),
                kind,
                self.measured,
                self.expected * 1.01 + 1e-3,
                self.tolerance,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub comparisons: Vec<Comparison>,
    /// Error text when the check could not be evaluated.
    pub error: Option<String>,
    pub seconds: f64,
}

impl CheckOutcome {
    /// The comparison with the largest deviation relative to its tolerance.
    pub fn worst(&self) -> Option<&Comparison> {
        self.comparisons.iter().max_by(|a, b| {
            let ra = a.deviation / a.tolerance;
            let rb = b.deviation / b.tolerance;
            ra.total_cmp(&rb)
        })
    }

    /// One-line human summary.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match (&self.error, self.worst()) {
            (Some(e), _) => format!("{:>2} {}: error: {} {}", self.id, self.name, e, verdict),
            (None, Some(c)) => format!(
                "{:>2} {}: {} measured {:.10e} expected {:.10e} deviation {:.3e} tol {:.1e}{} {}",
                self.id,
                self.name,
                c.label,
                c.measured,
                c.expected,
                c.deviation,
                c.tolerance,
                if c.kind == ComparisonKind::Relative { " rel" } else { "" },
                verdict
            ),
            (None, None) => format!("{:>2} {}: {}", self.id, self.name, verdict),
        }
    }
}

fn alpha() -> f64 {
    1.0 / DEFAULT_INV_ALPHA
}

fn config(beta: f64, gamma_omega: f64) -> Result<RotationConfig> {
    RotationConfig::with_gamma_omega(beta, gamma_omega, 0.0, alpha())
}

fn check_s_r_limit(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let closed = s_r_closed(0.0)?;
    let integral = s_r_integral(0.0, &o.spec)?.value;
    Ok(vec![
        Comparison::abs("s_r_closed(0)", closed, 1.0 / 120.0, 1e-9),
        Comparison::abs("s_r_integral(0)", integral, 1.0 / 120.0, 1e-9),
    ])
}

fn check_representations(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut worst_int = 0.0f64;
    let mut worst_pf = 0.0f64;
    let mut count = 0;
    while count < 200 {
        let f: f64 = rng.random_range(-6.0..6.0);
        // S_c has its pole at F = 0.
        if f.abs() < 0.05 {
            continue;
        }
        count += 1;
        let closed = s_r_closed(f)?;
        worst_int = worst_int.max((closed - s_r_integral(f, &o.spec)?.value).abs());
        let pf = s_d_partial_fractions(f, DEFAULT_PARTIAL_FRACTION_TERMS)?;
        worst_pf = worst_pf.max((pf - (s_c_closed(f)? + closed)).abs());
    }
    Ok(vec![
        Comparison::at_most("max |s_r_closed - s_r_integral|", worst_int, 1e-8),
        Comparison::at_most("max |s_d_pf - (s_c + s_r)|", worst_pf, 1e-8),
    ])
}

fn check_s1r_slope(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    // S₁,ᵣ is odd, so a Richardson step on S₁,ᵣ(h)/h removes the h² term.
    let h = 1e-2;
    let q1 = s1_r_integral(h, &o.spec)?.value / h;
    let q2 = s1_r_integral(2.0 * h, &o.spec)?.value / (2.0 * h);
    let slope = (4.0 * q1 - q2) / 3.0;
    Ok(vec![Comparison::rel("slope of s1_r_integral at 0", slope, S1R_SLOPE_PUBLISHED, 1e-6)])
}

fn check_x1(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let x1 = integral_x_n(1, &o.spec)?.value;
    let rounded = format!("{x1:.2e}").parse::<f64>().unwrap_or(f64::NAN);
    Ok(vec![
        Comparison::abs("X_1 to 2 significant figures", rounded, 0.013, 1e-12),
        Comparison::rel("X_1 regression", x1, X1_FROZEN, 1e-9),
    ])
}

fn check_jtilde(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    JTILDE_PUBLISHED
        .iter()
        .enumerate()
        .map(|(i, &want)| {
            let n = i as u32 + 1;
            Ok(Comparison::rel(format!("jtilde_{n}"), integral_jtilde_n(n, &o.spec)?.value, want, 1e-4))
        })
        .collect()
}

fn check_i1(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let c = config(0.01, 0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: f64 = rng.random_range(0.0..4.0);
        let n: u32 = rng.random_range(1..=12);
        let closed = integral_i1_n(x, n, &c)?;
        let quad = integral_i1_n_quadrature(x, n, &c, &o.spec)?.value;
        worst = worst.max((closed - quad).abs() / closed.abs().max(1.0));
    }
    Ok(vec![Comparison::at_most("max scaled |closed - quadrature|", worst, 1e-9)])
}

fn check_f2_null(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let c = config(0.0, 0.5)?;
    let f = force_grad2_quadrature(&c, DEFAULT_N_MAX, &o.spec)?.value;
    Ok(vec![Comparison::at_most("|F2| at beta = 0", f.abs(), 1e-12)])
}

fn check_orbit(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let s = solve_orbit(alpha(), Assembly::Paper, 1, &o.spec)?;
    let closed = closed_form_w(alpha(), s.coefficients[0])?;
    Ok(vec![
        Comparison::rel("R/(r_cl beta)", s.r_over_rcl_per_beta, ORBIT_RATIO_PUBLISHED, 1e-4),
        Comparison::rel("w vs closed form", s.w, closed, 1e-10),
    ])
}

fn check_simplified_correlator(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let mut worst = 0.0f64;
    for i in 0..10 {
        let beta = 0.01 + 0.49 * f64::from(i) / 9.0;
        let c = config(beta, 0.5)?;
        for j in 0..10 {
            let delta = 0.1 + 2.9 * f64::from(j) / 9.0;
            let simple = cf_ezhy_r(delta, &c, &o.spec)?.value;
            let full = cf_ezhy_r_unsimplified(delta, &c, &o.spec)?.value;
            worst = worst.max((simple - full).abs());
        }
    }
    Ok(vec![Comparison::at_most("max |simplified - unsimplified|", worst, 1e-8)])
}

fn check_tetrad(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0x7e7a);
    let mut ortho = 0.0f64;
    let mut velocity = 0.0f64;
    let mut invariants = 0.0f64;
    for _ in 0..1000 {
        let beta: f64 = rng.random_range(0.0..0.95);
        let angle: f64 = rng.random_range(0.0..2.0 * PI);
        let c = make_config(beta, 1.0, 0.0, alpha())?;
        let t = tetrad_at(angle, &c);
        ortho = ortho.max(t.orthonormality_defect());
        let u = four_velocity_check(&t, &c);
        let target = [0.0, 0.0, 0.0, -1.0];
        velocity = velocity.max(u.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let mut v = || rng.random_range(-1.0..1.0);
        let lab = FieldTriple::new([v(), v(), v()], [v(), v(), v()]);
        let frame = to_instantaneous_frame(&lab, angle, &c);
        let scale = c.gamma * c.gamma;
        invariants = invariants
            .max((frame.invariant_dot() - lab.invariant_dot()).abs() / scale)
            .max((frame.invariant_square() - lab.invariant_square()).abs() / scale);
    }
    Ok(vec![
        Comparison::at_most("max tetrad orthonormality defect", ortho, 1e-10),
        Comparison::at_most("max four-velocity defect", velocity, 1e-10),
        Comparison::at_most("max field invariant defect", invariants, 1e-10),
    ])
}

fn check_mc(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let c = make_config(0.1, 1.0, 0.0, alpha())?;
    let (n_max, delta) = (5, 1.0);
    let analytic = cf_ezhy_d_truncated(delta, &c, n_max, &o.spec)?.value;
    let opts = McOptions::for_n_max(n_max);
    let first = estimate_correlator_with(Observable::EzHy, delta, &c, n_max, o.mc_samples, o.seed, &opts)?;
    let shifted = McOptions {
        t1: 0.3 * 2.0 * PI,
        ..opts
    };
    let second =
        estimate_correlator_with(Observable::EzHy, delta, &c, n_max, o.mc_samples, o.seed.wrapping_add(1), &shifted)?;
    let pooled = first.std_error.hypot(second.std_error);
    Ok(vec![
        Comparison::at_most("|MC - truncated| / std_error", first.z_score(analytic), 3.0),
        Comparison::at_most("stationarity |t1 - t1'| / std_error", (first.mean - second.mean).abs() / pooled, 3.0),
    ])
}

fn check_assembly_gap(o: &VerifyOptions) -> Result<Vec<Comparison>> {
    let x1 = integral_x_n(1, &o.spec)?.value;
    let j11 = integral_j1_n(1, &o.spec)?.value;
    let jt1 = integral_jtilde_n(1, &o.spec)?.value;
    let b = force_total_smallbeta(&config(0.01, 1.0)?, DEFAULT_N_MAX, &o.spec)?;
    let gap = b.assembly_gap.abs();
    Ok(vec![
        Comparison::abs("12 X_1 + J_1,1 vs jtilde_1", 12.0 * x1 + j11, jt1, 1e-3),
        Comparison::rel("8 X_1 + J_1,1", 8.0 * x1 + j11, COMPONENTS_1_FROZEN, 1e-9),
        // The two assemblies differ by 4Xₙ per harmonic, i.e. by half the main force.
        Comparison::rel("components - published", b.assembly_gap, -0.5 * b.f_main, 1e-9),
        Comparison {
            passed: gap > 1e-6 * b.total_paper.abs(),
            ..Comparison::abs("assembly gap is nonzero", gap, 0.0, f64::INFINITY)
        },
    ])
}

type CheckFn = fn(&VerifyOptions) -> Result<Vec<Comparison>>;

const CHECKS: [CheckFn; 12] = [
    check_s_r_limit,
    check_representations,
    check_s1r_slope,
    check_x1,
    check_jtilde,
    check_i1,
    check_f2_null,
    check_orbit,
    check_simplified_correlator,
    check_tetrad,
    check_mc,
    check_assembly_gap,
];

/// Runs check `id` (1-based).
pub fn run_check(id: usize, options: &VerifyOptions) -> CheckOutcome {
    let name = CHECK_NAMES[id - 1].to_string();
    let start = Instant::now();
    let result = CHECKS[id - 1](options);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(mut comparisons) => {
            if options.fault.as_deref() == Some(name.as_str()) {
                if let Some(first) = comparisons.first_mut() {
                    *first = first.corrupted();
                }
            }
            CheckOutcome {
                id,
                passed: comparisons.iter().all(|c| c.passed),
                name,
                comparisons,
                error: None,
                seconds,
            }
        }
        Err(e) => CheckOutcome {
            id,
            name,
            passed: false,
            comparisons: Vec::new(),
            error: Some(e.to_string()),
            seconds,
        },
    }
}

pub fn run_check_named(name: &str, options: &VerifyOptions) -> Option<CheckOutcome> {
    CHECK_NAMES
        .iter()
        .position(|n| *n == name)
        .map(|i| run_check(i + 1, options))
}

pub fn run_all(options: &VerifyOptions) -> Vec<CheckOutcome> {
    (1..=CHECKS.len()).map(|id| run_check(id, options)).collect()
}
