//! Closed-form detection rates and the constants behind them.

use onebit::theory::{
    detection_threshold, lower_bound_rho_sq, risk_lower_bound, sdpi_beta, theory_constants,
    BoundInputs, DEFAULT_D_BAR,
};

fn main() -> onebit::Result<()> {
    let n = 1e4;
    println!("    m      d   rho_dist  rho_lower");
    for (m, d) in [(50.0, 500.0), (5000.0, 5.0), (500.0, 500.0), (10.0, 1000.0)] {
        let b = BoundInputs::new(n, m, d, 0.0, 0.05)?;
        println!(
            "{m:5} {d:6} {:10.5} {:10.6}",
            detection_threshold(&b),
            lower_bound_rho_sq(&b).sqrt()
        );
    }

    let b = BoundInputs::new(n, 50.0, 500.0, 0.005, 0.05)?;
    println!("risk lower bound at rho = 0.005: {:.4}", risk_lower_bound(&b));
    println!("contraction beta at rho = 0.005: {:.3e}", sdpi_beta(&b));

    let c = theory_constants(0.05, DEFAULT_D_BAR)?;
    println!("c_alpha = {:.6e}, M_alpha = {:.4e}, C_alpha = {:.4e}", c.c_alpha, c.m_alpha, c.big_c_alpha);
    Ok(())
}
