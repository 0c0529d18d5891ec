//! Evaluating the chi-square distribution function.
//!
//! ```sh
//! cargo run --example chi_square_cdf
//! ```

use onebit::stats::{chi_square_cdf, regularized_gamma_p, ChiSquareCdf};

fn main() -> onebit::Result<()> {
    for dof in [1u64, 2, 5, 50, 500, 5000] {
        // median sits just below the mean
        let f = ChiSquareCdf::new(dof)?;
        let mean = dof as f64;
        println!(
            "dof {dof:>5}: F(mean/2) = {:.6}  F(mean) = {:.6}  F(2 mean) = {:.6}",
            f.cdf(mean / 2.0)?,
            f.cdf(mean)?,
            f.cdf(2.0 * mean)?
        );
    }

    // F_2(x) = 1 - exp(-x/2)
    let x = 3.0;
    println!("F_2({x}) = {:.15}, closed form {:.15}", chi_square_cdf(x, 2)?, 1.0 - (-x / 2.0f64).exp());
    println!("P(2.5, 1.0) = {:.15}", regularized_gamma_p(2.5, 1.0)?);
    Ok(())
}
