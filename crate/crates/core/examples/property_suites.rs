//! Runs every randomized suite with a small trial count and prints a summary.

use qig::verify::{self, DimRange};

fn main() -> qig::Result<()> {
    let reports = verify::run_all(25, 0, DimRange::new(2, 4)?);
    for r in &reports {
        println!(
            "{:<20} {:>4} trials  {}  margin {:>10}  residual {:>10}",
            r.suite.to_string(),
            r.trials,
            if r.passed() { "ok  " } else { "FAIL" },
            r.min_margin.map_or("-".into(), |v| format!("{v:.2e}")),
            r.max_residual.map_or("-".into(), |v| format!("{v:.2e}")),
        );
    }
    Ok(())
}
