//! Running a custom sweep and reading back the CSV it writes.

use onebit::experiments::{read_csv, run_experiment, ExperimentSpec, InstanceRule, Sweep};
use onebit::{CountThreshold, TestKind};

fn main() -> onebit::Result<()> {
    let spec = ExperimentSpec {
        name: "demo".into(),
        sweep: Sweep::RhoGrid { lo: 0.0, hi: 0.6, points: 7 },
        instance_rule: InstanceRule::Fixed { n: 2_000, m: 20, d: 50 },
        tests: vec![TestKind::ChiSqCount, TestKind::SignCount, TestKind::SingleMachine],
        replications: 200,
        alpha: 0.05,
        root_seed: 3,
        threshold_rule: CountThreshold::ExactBinomial,
    };
    let dir = std::env::temp_dir().join("onebit-demo");
    std::fs::create_dir_all(&dir).map_err(|e| onebit::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("demo.csv");

    let summary = run_experiment(&spec, &path, 2)?;
    println!("wrote {} rows to {}", summary.rows, summary.csv_path.display());
    println!("metadata in {}", summary.meta_path.display());
    for row in read_csv(&path)? {
        println!("{:>13} rho={:.1} tpr={:.3}", row.test_kind, row.rho, row.tpr);
    }
    Ok(())
}
