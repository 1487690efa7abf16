//! Runs the ten acceptance checks at their stated trial counts and
//! tolerances, one line per check, then the CLI end to end.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ghtree::verify::{run_criterion, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    for id in 1..=10u8 {
        let rec = run_criterion(id, &cfg).expect("checks are numbered 1 to 10");
        let status = if rec.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status}  {:<30} trials={:<4} failures={} worst_residual={:e} runtime_ms={}",
            rec.id, rec.name, rec.trials, rec.failures, rec.worst_residual, rec.runtime_ms
        );
        for note in &rec.notes {
            println!("    {note}");
        }
        if !rec.passed {
            failed += 1;
        }
    }

    // The full suite through the binary, under the five minute allowance.
    let cli_start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ghtree"))
        .args(["verify", "--seed", "7"])
        .output()
        .expect("binary runs");
    let secs = cli_start.elapsed().as_secs_f64();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let cli_ok = out.status.code() == Some(0) && report["passed"] == true && secs < 300.0;
    println!(
        "verify --seed 7 {}  exit={:?} runtime_s={secs:.2}",
        if cli_ok { "PASS" } else { "FAIL" },
        out.status.code()
    );
    if !cli_ok {
        failed += 1;
    }

    println!("acceptance: {failed} failing, {:.2} s", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
