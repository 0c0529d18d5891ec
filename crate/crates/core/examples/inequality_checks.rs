//! Monte Carlo checks of the probabilistic inequalities behind the bounds.

use onebit::stats::RngStream;
use onebit::theory::{verify_chernoff, verify_chisq_dominance, verify_subgaussian_tail};

fn main() -> onebit::Result<()> {
    let stream = RngStream::new(5, 0);

    let c = verify_chisq_dominance(400, 5.0, 200_000, &stream)?;
    println!("P(V >= U) = {:.4} vs bound {:.4}: {}", c.empirical, c.bound, c.passed());

    let c = verify_chernoff(0.5, 100, 0.3, 200_000, &stream.substream(1))?;
    println!("Chernoff tail {:.4} vs bound {:.4}: {}", c.empirical, c.bound, c.passed());

    let r = verify_subgaussian_tail(20, 0.3, 1.0, 200_000, &stream.substream(2))?;
    for p in r.points.iter().filter(|p| !p.vacuous()) {
        println!("s = {:.3}: tail {:.5} bound {:.5}", p.s, p.empirical, p.bound);
    }
    println!("sub-Gaussian tail holds: {}", r.passed());
    Ok(())
}
