//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::ExitCode;

use rescaledexp::verify::{bundled_datasets, run_all};

fn main() -> ExitCode {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let datasets = match bundled_datasets(&dir) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot open bundled datasets in {}: {e}", dir.display());
            return ExitCode::FAILURE;
        }
    };
    let outcomes = run_all(&datasets);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
