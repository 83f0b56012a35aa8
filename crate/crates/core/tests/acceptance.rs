//! One pass/fail line per acceptance criterion. Runs without the libtest harness so the
//! lines always appear in `cargo test` output.

use std::time::{Duration, Instant};

use deligne::holonomy::DEFAULT_STEPS;
use deligne::report::{criterion, criterion_title, CRITERIA};

const SEED: u64 = 0;
const HOLONOMY_BUDGET: Duration = Duration::from_secs(10);

fn main() {
    let mut failed = Vec::new();
    for k in 1..=CRITERIA {
        let start = Instant::now();
        let rep = criterion(k, SEED, DEFAULT_STEPS);
        let elapsed = start.elapsed();
        let worst = rep.records().iter().map(|r| r.residual).fold(0.0, f64::max);
        let mut pass = rep.passed();
        let mut note = format!("{} checks, worst residual {:.2e}, {:.2}s", rep.len(), worst, elapsed.as_secs_f64());
        if k == 1 && elapsed > HOLONOMY_BUDGET {
            pass = false;
            note.push_str(", over the time budget");
        }
        println!("criterion {:2} [{}] {}: {}", k, if pass { "PASS" } else { "FAIL" }, criterion_title(k), note);
        for r in rep.failures() {
            println!("    failed {} ({}): residual {:e}, tolerance {:e} {:?}", r.id, r.anchor, r.residual, r.tolerance, r.detail);
        }
        if !pass {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {:?}", failed);
        std::process::exit(1);
    }
    println!("all {} criteria passed", CRITERIA);
}
