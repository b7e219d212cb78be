//! Acceptance criteria 1 to 10 with the default caps and seed 1.
//!
//! Runs without the libtest harness so that the per-criterion lines are
//! always printed. All comparisons are exact over the rationals; the one
//! floating-point comparison (treedepth against `(tw + 1)·log2 n`) allows
//! an absolute slack of 1e-9.

use std::process::ExitCode;
use std::time::Instant;

use homcircuits::cli::suite::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    println!("acceptance: seed {}, exact arithmetic, log-bound slack 1e-9", cfg.seed);
    let mut failed = 0;
    for k in 1..=CRITERIA.len() {
        let start = Instant::now();
        let o = run_criterion(k, &cfg);
        println!("{} [{:.1}s]", o.line(), start.elapsed().as_secs_f64());
        for f in &o.failures {
            println!("    {f}");
        }
        if !o.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
