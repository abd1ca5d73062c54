//! Runs the twelve acceptance checks and prints one line per check.
//!
//! Exits non-zero when any check fails.

use std::io::Write;
use std::process::ExitCode;

use zpf_core::verify::{run_check, VerifyOptions, CHECK_NAMES};

fn main() -> ExitCode {
    let options = VerifyOptions::default();
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    println!("running {} acceptance checks", CHECK_NAMES.len());
    for id in 1..=CHECK_NAMES.len() {
        let outcome = run_check(id, &options);
        let mut out = stdout.lock();
        let _ = writeln!(out, "acceptance {} ({:.2}s)", outcome.line(), outcome.seconds);
        for c in &outcome.comparisons {
            let _ = writeln!(
                out,
                "    {:<5} {}: measured {:.17e} expected {:.17e} deviation {:.3e} tol {:.1e}",
                if c.passed { "ok" } else { "FAIL" },
                c.label,
                c.measured,
                c.expected,
                c.deviation,
                c.tolerance
            );
        }
        let _ = out.flush();
        if !outcome.passed {
            failed.push(outcome.name);
        }
    }
    println!(
        "acceptance result: {} passed; {} failed{}",
        CHECK_NAMES.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({})", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
