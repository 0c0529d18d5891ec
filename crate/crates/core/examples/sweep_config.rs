//! Describing a sweep in TOML.

use onebit::experiments::parse_spec;

const CONFIG: &str = r#"
name = "machines_grow"
sweep = "n"
grid_lo = 100
grid_hi = 30000
grid_points = 8
instance = "machine_growth"
d = 5
fraction = 0.1
tests = ["SignCount"]
replications = 50
"#;

fn main() -> onebit::Result<()> {
    let spec = parse_spec(CONFIG)?;
    println!("{} over {} with {}", spec.name, spec.sweep, spec.instance_rule);
    let (points, skipped) = spec.grid();
    for p in &points {
        println!("n={:>6} m={:>5} d={} rho={:.4}", p.n, p.m, p.d, p.rho);
    }
    println!("skipped: {skipped:?}");

    // unknown keys are rejected
    let err = parse_spec(&format!("{CONFIG}\ncolour = \"red\"")).unwrap_err();
    println!("error: {err} (exit code {})", err.exit_code());
    Ok(())
}
