//! Runs the full verification suite and prints every check.

use ermakov::run::verify::{verify, Suite};

fn main() {
    let t = std::time::Instant::now();
    let report = verify(Suite::All);
    for c in &report.checks {
        let status = if c.passed { "ok" } else { "FAIL" };
        println!("{status:<5} {:<64} {:>10.3e}  gate {:.0e}", c.name, c.residual, c.gate);
    }
    println!(
        "passed={} product={:.3e} invariant={:.3e} oracle={:.3e} ({:.1?})",
        report.passed,
        report.max_product_deviation,
        report.max_invariant_drift,
        report.max_oracle_mismatch,
        t.elapsed()
    );
}
