//! Sampling noncentral chi-square variables and checking their moments.

use onebit::stats::{noncentral_chi_square_sample, ChiSquareParams, RngStream};

fn main() -> onebit::Result<()> {
    let draws = 100_000u64;
    for (d, delta) in [(5u64, 0.0), (5, 2.0), (500, 4.5), (1000, 30.0)] {
        let params = ChiSquareParams::new(d, delta)?;
        let root = RngStream::new(11, d ^ delta.to_bits());
        let (mut sum, mut sq) = (0.0, 0.0);
        for i in 0..draws {
            let v = noncentral_chi_square_sample(&root.substream(i), &params);
            sum += v;
            sq += v * v;
        }
        let mean = sum / draws as f64;
        let var = sq / draws as f64 - mean * mean;
        println!(
            "d={d:>4} delta={delta:>5}: mean {mean:>9.3} (exact {:>7.1})  var {var:>9.2} (exact {:>7.1})",
            d as f64 + delta,
            2.0 * (d as f64 + 2.0 * delta)
        );
    }
    Ok(())
}
