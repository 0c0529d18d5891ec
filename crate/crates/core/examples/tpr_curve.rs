//! True positive rate as a function of the signal size.

use onebit::simulator::tpr_curve;
use onebit::{ProblemInstance, TestKind};

fn main() -> onebit::Result<()> {
    let inst = ProblemInstance::new(10_000, 5000, 5, 0.05)?;
    let grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    let chisq = tpr_curve(TestKind::ChiSqCount, &inst, &grid, 200, 9)?;
    let sign = tpr_curve(TestKind::SignCount, &inst, &grid, 200, 9)?;
    println!("  rho   ChiSqCount  SignCount");
    for ((rho, a), (_, b)) in chisq.iter().zip(&sign) {
        println!("{rho:5.2}   {:9.3}  {:9.3}", a.tpr, b.tpr);
    }
    Ok(())
}
