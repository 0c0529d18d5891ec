//! Monte Carlo type I and type II errors at a single instance.
//!
//! ```sh
//! cargo run --release --example risk_estimate
//! ```

use onebit::simulator::estimate_risk;
use onebit::{AlternativeSpec, CountThreshold, ProblemInstance, Simulation, TestKind};

fn main() -> onebit::Result<()> {
    let inst = ProblemInstance::new(10_000, 50, 500, 0.05)?;
    let alt = AlternativeSpec::rademacher(0.3)?;
    for kind in TestKind::ALL {
        let est = estimate_risk(kind, &inst, &alt, 2_000, 1)?;
        println!(
            "{kind:>13}: type1 {:.4}  tpr {:.4} ± {:.4}  risk {:.4}",
            est.type1,
            est.tpr,
            est.std_err_tpr(),
            est.risk()
        );
    }

    // The union-bound thresholds cannot fire at m = 50.
    let sim = Simulation::new(1).with_rule(CountThreshold::Theoretical);
    let est = sim.estimate_risk(TestKind::ChiSqCount, &inst, &alt, 500)?;
    println!("ChiSqCount with theoretical threshold: tpr {:.3}", est.tpr);
    Ok(())
}
