use serde::{Deserialize, Serialize};
use zpf_core::forces::{force_total_smallbeta, integral_j1_n, integral_jtilde_n, integral_x_n, HarmonicTerm};
use zpf_core::selfconsistency::{solve_orbit, verify_regime};
use zpf_core::verify::{run_check, ComparisonKind, VerifyOptions, CHECK_NAMES};
use zpf_core::{Assembly, QuadratureSpec, RegimeReport, RotationConfig, SelfConsistentSolution};

use crate::manifest::{now_utc, parse_timestamp, RunManifest};
use crate::output::{fmt_f64, fmt_opt, write_csv, write_json, Table};
use crate::{Cli, Command, Common, Failure, Format, Report, Status, TableKind};

/// Largest harmonic index accepted by `table`.
pub const TABLE_N_LIMIT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub value: f64,
    pub abs_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub id: usize,
    pub name: String,
    pub check_passed: bool,
    pub label: String,
    pub kind: String,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub deviation: Option<f64>,
    pub passed: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub gamma_omega: f64,
    pub omega0_ratio: f64,
    /// "ok" or "out_of_regime"
    pub status: String,
    pub note: String,
    pub f_main: Option<f64>,
    pub f_grad1: Option<f64>,
    pub f_grad2: Option<f64>,
    pub total_components: Option<f64>,
    pub total_paper: Option<f64>,
    pub assembly_gap: Option<f64>,
    /// Total of the selected assembly, coefficient of (e²ħ/mc⁴)Ω₀³β.
    pub total: Option<f64>,
    /// `total·β`, coefficient of (e²ħ/mc⁴)Ω₀³.
    pub force: Option<f64>,
    /// `force/β`
    pub force_over_beta: Option<f64>,
    pub truncation_bound: Option<f64>,
    pub abs_error_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(flatten)]
    pub row: SweepRow,
    pub per_harmonic: Option<Vec<HarmonicTerm>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solution: SelfConsistentSolution,
    pub regime: RegimeReport,
    /// R/(r_cl β) with a single harmonic, for comparison.
    pub single_term_ratio: f64,
    pub ratio_shift_vs_one_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub alpha: f64,
    pub assembly: String,
    pub n_terms: usize,
    pub w: f64,
    pub gamma_omega: f64,
    pub r_over_rcl_per_beta: f64,
    pub r_over_rzbw_per_beta: f64,
    pub residual: f64,
    pub conclusion: String,
    pub assembly_label: String,
    pub ratio_shift_vs_one_term: f64,
}

fn spec_from(common: &Common) -> Result<QuadratureSpec, Failure> {
    for (name, v) in [("--tol-rel", common.tol_rel), ("--tol-abs", common.tol_abs)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::usage(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(QuadratureSpec::with_tolerances(common.tol_rel, common.tol_abs))
}

fn manifest(cli: &Cli, command: &str, spec: QuadratureSpec) -> Result<RunManifest, Failure> {
    let c = &cli.common;
    let timestamp = match &c.timestamp {
        Some(raw) => parse_timestamp(raw).map_err(Failure::usage)?,
        None => now_utc(),
    };
    Ok(RunManifest::new(command, spec, timestamp)
        .param("assembly", Assembly::from(c.assembly).name())
        .param("format", if c.format == Format::Csv { "csv" } else { "json" })
        .param("n_max", c.n_max)
        .param("seed", c.seed))
}

fn render<T: Serialize>(format: Format, manifest: &RunManifest, table: Table, json: &T) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Csv => write_csv(manifest, &table),
        Format::Json => write_json(manifest, json),
    }
    .map_err(Failure::io)
}

pub fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    if cli.common.n_max == 0 {
        return Err(Failure::usage("--n-max must be at least 1"));
    }
    let spec = spec_from(&cli.common)?;
    match &cli.command {
        Command::Verify { checks, mc_samples } => verify(cli, spec, checks, *mc_samples),
        Command::Table { what, range } => table(cli, spec, *what, range),
        Command::Sweep {
            beta,
            gamma_omega,
            omega0,
            inv_alpha,
        } => sweep(cli, spec, beta, gamma_omega, *omega0, *inv_alpha),
        Command::Solve { inv_alpha, n_terms } => solve(cli, spec, *inv_alpha, *n_terms),
    }
}

fn verify(cli: &Cli, spec: QuadratureSpec, checks: &[String], mc_samples: usize) -> Result<Report, Failure> {
    let ids = if checks.is_empty() {
        (1..=CHECK_NAMES.len()).collect::<Vec<_>>()
    } else {
        checks
            .iter()
            .map(|name| {
                CHECK_NAMES
                    .iter()
                    .position(|n| n == name)
                    .map(|i| i + 1)
                    .ok_or_else(|| Failure::usage(format!("unknown check {name:?}; known: {}", CHECK_NAMES.join(", "))))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(f) = &cli.common.inject_fault {
        if !CHECK_NAMES.contains(&f.as_str()) {
            return Err(Failure::usage(format!("unknown check {f:?}")));
        }
    }
    if mc_samples < 2 {
        return Err(Failure::usage("--mc-samples must be at least 2"));
    }
    let options = VerifyOptions {
        spec,
        seed: cli.common.seed,
        mc_samples,
        fault: cli.common.inject_fault.clone(),
    };
    let outcomes: Vec<_> = ids.iter().map(|&id| run_check(id, &options)).collect();

    let mut rows = Vec::new();
    for o in &outcomes {
        if let Some(e) = &o.error {
            rows.push(VerifyRow {
                id: o.id,
                name: o.name.clone(),
                check_passed: false,
                label: String::new(),
                kind: String::new(),
                measured: None,
                expected: None,
                tolerance: None,
                deviation: None,
                passed: false,
                error: e.clone(),
            });
        }
        for c in &o.comparisons {
            rows.push(VerifyRow {
                id: o.id,
                name: o.name.clone(),
                check_passed: o.passed,
                label: c.label.clone(),
                kind: match c.kind {
                    ComparisonKind::Absolute => "absolute",
                    ComparisonKind::Relative => "relative",
                    ComparisonKind::AtMost => "at_most",
                }
                .to_string(),
                measured: Some(c.measured),
                expected: Some(c.expected),
                tolerance: Some(c.tolerance),
                deviation: Some(c.deviation),
                passed: c.passed,
                error: String::new(),
            });
        }
    }
    let table = Table {
        header: vec![
            "id", "name", "check_passed", "label", "kind", "measured", "expected", "tolerance", "deviation", "passed",
            "error",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.id.to_string(),
                    r.name.clone(),
                    r.check_passed.to_string(),
                    r.label.clone(),
                    r.kind.clone(),
                    fmt_opt(r.measured),
                    fmt_opt(r.expected),
                    fmt_opt(r.tolerance),
                    fmt_opt(r.deviation),
                    r.passed.to_string(),
                    r.error.clone(),
                ]
            })
            .collect(),
    };
    let names: Vec<&str> = ids.iter().map(|&i| CHECK_NAMES[i - 1]).collect();
    let m = manifest(cli, "verify", spec)?
        .param("checks", names.join(","))
        .param("mc_samples", mc_samples);
    let body = render(cli.common.format, &m, table, &rows)?;

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    let mut summary: String = outcomes.iter().map(|o| format!("{}\n", o.line())).collect();
    summary.push_str(&format!(
        "{} passed; {} failed{}\n",
        outcomes.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(": {}", failed.join(", "))
        }
    ));
    Ok(Report {
        body,
        summary,
        status: if failed.is_empty() {
            Status::Ok
        } else {
            Status::AcceptanceFailure
        },
    })
}

/// Parses `a..b` (inclusive) or a single index.
pub fn parse_range(raw: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::usage(format!("range must look like 1..6, got {raw:?}"));
    let (a, b) = match raw.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (raw, raw),
    };
    let from: u32 = a.trim().parse().map_err(|_| bad())?;
    let to: u32 = b.trim().parse().map_err(|_| bad())?;
    if from < 1 || from > to || to > TABLE_N_LIMIT {
        return Err(Failure::usage(format!(
            "range must satisfy 1 <= from <= to <= {TABLE_N_LIMIT}, got {from}..{to}"
        )));
    }
    Ok((from, to))
}

fn table(cli: &Cli, spec: QuadratureSpec, what: TableKind, range: &str) -> Result<Report, Failure> {
    use rayon::prelude::*;
    let (from, to) = parse_range(range)?;
    let name = match what {
        TableKind::Jtilde => "jtilde",
        TableKind::Xn => "xn",
        TableKind::J1n => "j1n",
    };
    let rows = (from..=to)
        .into_par_iter()
        .map(|n| {
            let r = match what {
                TableKind::Jtilde => integral_jtilde_n(n, &spec),
                TableKind::Xn => integral_x_n(n, &spec),
                TableKind::J1n => integral_j1_n(n, &spec),
            }?;
            Ok(TableRow {
                n,
                value: r.value,
                abs_error_estimate: r.abs_error_estimate,
            })
        })
        .collect::<Result<Vec<_>, zpf_core::Error>>()?;
    let t = Table {
        header: vec!["n", "value", "abs_error_estimate"],
        rows: rows
            .iter()
            .map(|r| vec![r.n.to_string(), fmt_f64(r.value), fmt_f64(r.abs_error_estimate)])
            .collect(),
    };
    let m = manifest(cli, "table", spec)?
        .param("what", name)
        .param("n_from", from)
        .param("n_to", to);
    let body = render(cli.common.format, &m, t, &rows)?;
    let summary = rows
        .iter()
        .map(|r| format!("{name}[{}] = {:.10e} ± {:.1e}\n", r.n, r.value, r.abs_error_estimate))
        .collect();
    Ok(Report {
        body,
        summary,
        status: Status::Ok,
    })
}

fn sweep_point(
    beta: f64,
    gamma_omega: f64,
    omega0: f64,
    alpha: f64,
    assembly: Assembly,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<SweepPoint, Failure> {
    let empty = |status: &str, note: String| SweepPoint {
        row: SweepRow {
            beta,
            gamma_omega,
            omega0_ratio: omega0,
            status: status.to_string(),
            note,
            f_main: None,
            f_grad1: None,
            f_grad2: None,
            total_components: None,
            total_paper: None,
            assembly_gap: None,
            total: None,
            force: None,
            force_over_beta: None,
            truncation_bound: None,
            abs_error_estimate: None,
        },
        per_harmonic: None,
    };
    let config = RotationConfig::with_gamma_omega(beta, gamma_omega, omega0, alpha).map_err(Failure::from)?;
    match force_total_smallbeta(&config, n_max, spec) {
        Ok(b) => {
            let total = b.total_for(assembly);
            let force = total * beta;
            Ok(SweepPoint {
                row: SweepRow {
                    status: "ok".to_string(),
                    note: String::new(),
                    f_main: Some(b.f_main),
                    f_grad1: Some(b.f_grad1),
                    f_grad2: Some(b.f_grad2),
                    total_components: Some(b.total),
                    total_paper: Some(b.total_paper),
                    assembly_gap: Some(b.assembly_gap),
                    total: Some(total),
                    force: Some(force),
                    force_over_beta: (beta > 0.0).then(|| force / beta),
                    truncation_bound: Some(b.truncation_bound),
                    abs_error_estimate: Some(b.abs_error_estimate),
                    ..empty("ok", String::new()).row
                },
                per_harmonic: Some(b.per_harmonic),
            })
        }
        Err(zpf_core::Error::OutOfRegime(msg)) => Ok(empty("out_of_regime", msg)),
        Err(e) => Err(e.into()),
    }
}

fn sweep(
    cli: &Cli,
    spec: QuadratureSpec,
    betas: &[f64],
    gammas: &[f64],
    omega0: f64,
    inv_alpha: f64,
) -> Result<Report, Failure> {
    if betas.is_empty() || gammas.is_empty() {
        return Err(Failure::usage("sweep needs at least one --beta and one --gamma-omega value"));
    }
    if !(inv_alpha.is_finite() && inv_alpha > 0.0) {
        return Err(Failure::usage(format!("--inv-alpha must be positive, got {inv_alpha}")));
    }
    let assembly = Assembly::from(cli.common.assembly);
    let mut points = Vec::with_capacity(betas.len() * gammas.len());
    for &b in betas {
        for &g in gammas {
            if !(g.is_finite() && g > 0.0) {
                return Err(Failure::usage(format!("ΓΩ₀ values must be positive, got {g}")));
            }
            points.push(sweep_point(b, g, omega0, 1.0 / inv_alpha, assembly, cli.common.n_max, &spec)?);
        }
    }
    let t = Table {
        header: vec![
            "beta",
            "gamma_omega",
            "omega0_ratio",
            "status",
            "note",
            "f_main",
            "f_grad1",
            "f_grad2",
            "total_components",
            "total_paper",
            "assembly_gap",
            "total",
            "force",
            "force_over_beta",
            "truncation_bound",
            "abs_error_estimate",
        ],
        rows: points
            .iter()
            .map(|p| {
                let r = &p.row;
                vec![
                    fmt_f64(r.beta),
                    fmt_f64(r.gamma_omega),
                    fmt_f64(r.omega0_ratio),
                    r.status.clone(),
                    r.note.clone(),
                    fmt_opt(r.f_main),
                    fmt_opt(r.f_grad1),
                    fmt_opt(r.f_grad2),
                    fmt_opt(r.total_components),
                    fmt_opt(r.total_paper),
                    fmt_opt(r.assembly_gap),
                    fmt_opt(r.total),
                    fmt_opt(r.force),
                    fmt_opt(r.force_over_beta),
                    fmt_opt(r.truncation_bound),
                    fmt_opt(r.abs_error_estimate),
                ]
            })
            .collect(),
    };
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let m = manifest(cli, "sweep", spec)?
        .param("beta", join(betas))
        .param("gamma_omega", join(gammas))
        .param("omega0", omega0)
        .param("inv_alpha", inv_alpha);
    let body = render(cli.common.format, &m, t, &points)?;
    let rejected = points.iter().filter(|p| p.row.status != "ok").count();
    let mut summary: String = points
        .iter()
        .map(|p| match p.row.total {
            Some(t) => format!(
                "beta={} gamma_omega={}: total = {:.10e} {}\n",
                p.row.beta,
                p.row.gamma_omega,
                t,
                zpf_core::forces::FORCE_UNITS
            ),
            None => format!("beta={} gamma_omega={}: {}\n", p.row.beta, p.row.gamma_omega, p.row.note),
        })
        .collect();
    if rejected > 0 {
        summary.push_str(&format!("{rejected} grid point(s) outside the validity gates\n"));
    }
    Ok(Report {
        body,
        summary,
        status: if rejected > 0 { Status::OutOfRegime } else { Status::Ok },
    })
}

fn solve(cli: &Cli, spec: QuadratureSpec, inv_alpha: f64, n_terms: usize) -> Result<Report, Failure> {
    if !(inv_alpha.is_finite() && inv_alpha > 0.0) {
        return Err(Failure::usage(format!("--inv-alpha must be positive, got {inv_alpha}")));
    }
    if n_terms == 0 {
        return Err(Failure::usage("--n-terms must be at least 1"));
    }
    let alpha = 1.0 / inv_alpha;
    let assembly = Assembly::from(cli.common.assembly);
    let solution = solve_orbit(alpha, assembly, n_terms, &spec)?;
    let single = solve_orbit(alpha, assembly, 1, &spec)?;
    let regime = verify_regime(&solution);
    let shift = (solution.r_over_rcl_per_beta - single.r_over_rcl_per_beta) / single.r_over_rcl_per_beta;
    let row = SolveRow {
        alpha,
        assembly: assembly.name().to_string(),
        n_terms,
        w: solution.w,
        gamma_omega: solution.gamma_omega,
        r_over_rcl_per_beta: solution.r_over_rcl_per_beta,
        r_over_rzbw_per_beta: solution.r_over_rzbw_per_beta,
        residual: solution.residual,
        conclusion: regime.conclusion.clone(),
        assembly_label: regime.assembly_label.clone(),
        ratio_shift_vs_one_term: shift,
    };
    let t = Table {
        header: vec![
            "alpha",
            "assembly",
            "n_terms",
            "w",
            "gamma_omega",
            "r_over_rcl_per_beta",
            "r_over_rzbw_per_beta",
            "residual",
            "conclusion",
            "assembly_label",
            "ratio_shift_vs_one_term",
        ],
        rows: vec![vec![
            fmt_f64(row.alpha),
            row.assembly.clone(),
            row.n_terms.to_string(),
            fmt_f64(row.w),
            fmt_f64(row.gamma_omega),
            fmt_f64(row.r_over_rcl_per_beta),
            fmt_f64(row.r_over_rzbw_per_beta),
            fmt_f64(row.residual),
            row.conclusion.clone(),
            row.assembly_label.clone(),
            fmt_f64(row.ratio_shift_vs_one_term),
        ]],
    };
    let m = manifest(cli, "solve", spec)?
        .param("inv_alpha", inv_alpha)
        .param("n_terms", n_terms);
    let result = SolveResult {
        solution,
        regime,
        single_term_ratio: single.r_over_rcl_per_beta,
        ratio_shift_vs_one_term: shift,
    };
    let body = render(cli.common.format, &m, t, &result)?;
    let summary = format!(
        "w = hbar*Omega0/(m c^2) = {:.10}\nGamma*Omega0 = {:.10}\nR/(r_cl beta) = {:.10}\nR/(r_zbw beta) = {:.10e}\nconclusion: {} ({})\n",
        row.w, row.gamma_omega, row.r_over_rcl_per_beta, row.r_over_rzbw_per_beta, row.conclusion, row.assembly_label
    );
    Ok(Report {
        body,
        summary,
        status: Status::Ok,
    })
}
