//! Tabulating detection rates across the elbow at m = d.

use onebit::experiments::{bounds_rows, InstanceShape};

fn main() -> onebit::Result<()> {
    let grid: Vec<InstanceShape> = [1u64, 10, 100, 250, 500, 1000, 5000, 10_000]
        .into_iter()
        .map(|m| InstanceShape { n: 10_000, m, d: 500 })
        .collect();
    println!("     m   rho_dist   rho_lower   risk_lb(0.1 rho_dist)");
    for r in bounds_rows(&grid, 0.05, &[0.1])? {
        println!("{:6} {:10.5} {:11.6} {:12.4}", r.m, r.rho_dist, r.rho_lower, r.risk_lower_bound);
    }
    Ok(())
}
