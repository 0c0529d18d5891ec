//! The two built-in experiments at reduced replication counts.
//!
//! ```sh
//! cargo run --release --example builtin_experiments
//! ```

use onebit::experiments::{builtin_experiment_1, builtin_experiment_2, compute_experiment};

fn main() -> onebit::Result<()> {
    for spec in builtin_experiment_1() {
        let spec = spec.with_replications(20);
        let out = compute_experiment(&spec)?;
        let at = |rho: f64, kind: &str| {
            out.rows
                .iter()
                .find(|r| (r.rho - rho).abs() < 1e-9 && r.test_kind == kind)
                .map(|r| r.tpr)
                .unwrap_or(f64::NAN)
        };
        println!(
            "{}: tpr at rho=0.2 ChiSq {:.2} Sign {:.2}; at rho=0.5 ChiSq {:.2} Sign {:.2}",
            spec.name,
            at(0.2, "ChiSqCount"),
            at(0.2, "SignCount"),
            at(0.5, "ChiSqCount"),
            at(0.5, "SignCount")
        );
    }
    for spec in builtin_experiment_2() {
        let (points, skipped) = spec.grid();
        let last = points.last().expect("grid is nonempty");
        println!(
            "{}: {} points, {} skipped, largest n={} m={} d={} rho={:.4}",
            spec.name,
            points.len(),
            skipped.len(),
            last.n,
            last.m,
            last.d,
            last.rho
        );
    }
    Ok(())
}
