//! One round of each distributed test on hand-built observations.

use onebit::stats::{gaussian_vector, RngStream};
use onebit::protocol::run_protocol;
use onebit::{LocalObservation, ProblemInstance, PublicCoin, TestKind};

fn main() -> onebit::Result<()> {
    let inst = ProblemInstance::new(10_000, 50, 500, 0.05)?;
    let scale = inst.noise_scale();
    let rho = 0.6;
    let mu = vec![rho / (inst.d() as f64).sqrt(); inst.d()];

    // X_j = mu + sqrt(m/n) Z_j
    let observations: Vec<LocalObservation> = (0..inst.m())
        .map(|j| {
            let z = gaussian_vector(&RngStream::new(1, j), inst.d());
            LocalObservation::new(mu.iter().zip(z).map(|(m, z)| m + scale * z).collect())
        })
        .collect();
    let streams: Vec<RngStream> = (0..inst.m()).map(|j| RngStream::new(2, j)).collect();
    let coin = PublicCoin::draw(&RngStream::new(3, 0), inst.d());

    for kind in TestKind::ALL {
        let run = run_protocol(kind, &observations, Some(&coin), &inst, &streams)?;
        println!(
            "{kind:>13}: {:>2} of {} bits set, reject = {}, coin ignored = {}",
            run.transcript.ones(),
            run.transcript.len(),
            run.decision,
            run.coin_ignored
        );
    }
    println!("suggested test for this (m, d): {}", onebit::protocol::select_regime(&inst));
    Ok(())
}
