use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use onebit::experiments::{
    builtin_experiment_1, builtin_experiment_2, emit_bounds_table, load_spec, run_experiment,
    standard_battery, ExperimentSpec, InstanceShape,
};
use onebit::{Error, Result};

#[derive(Parser)]
#[command(name = "onebit", version, about = "One-bit distributed signal detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Root seed; overrides the experiment definition.
    #[arg(long)]
    seed: Option<u64>,
    /// Replications per grid point; overrides the experiment definition.
    #[arg(long)]
    replications: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed n, signal-size sweeps for (m, d) = (50, 500) and (5000, 5).
    Experiment1(Common),
    /// Growing-n scenarios.
    Experiment2(Common),
    /// A user sweep read from a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Detection rates and risk lower bounds over an m grid.
    Bounds {
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        /// Dimensions to tabulate.
        #[arg(long, value_delimiter = ',', default_values_t = [5u64, 500])]
        d: Vec<u64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Signal sizes as multiples of the detection rate.
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.5, 1.0])]
        factors: Vec<f64>,
        /// Output CSV file.
        #[arg(long, default_value = "results/bounds.csv")]
        out: PathBuf,
    },
    /// Monte Carlo checks of the inequalities behind the bounds.
    Verify {
        #[arg(long, default_value_t = 20_240_117)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        replications: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn workers(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

fn run_specs(specs: Vec<ExperimentSpec>, common: &Common) -> Result<()> {
    let specs: Vec<_> = specs
        .into_iter()
        .map(|mut s| {
            if let Some(seed) = common.seed {
                s = s.with_seed(seed);
            }
            if let Some(r) = common.replications {
                s = s.with_replications(r);
            }
            s.validate().map(|_| s)
        })
        .collect::<Result<_>>()?;
    create_dir(&common.out)?;
    for spec in &specs {
        let path = common.out.join(format!("{}.csv", spec.name));
        let summary = run_experiment(spec, &path, workers(common.workers))?;
        println!(
            "{}: {} rows in {:.1}s -> {}",
            spec.name,
            summary.rows,
            summary.wall_time_secs,
            summary.csv_path.display()
        );
        if !summary.skipped.is_empty() {
            println!("  skipped {} grid values with m outside [1, n]", summary.skipped.len());
        }
    }
    Ok(())
}

fn bounds(n: u64, dims: &[u64], alpha: f64, factors: &[f64], out: &Path) -> Result<()> {
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    let mut grid = Vec::new();
    for &d in dims {
        // 41 log-spaced machine counts in [1, n]
        let mut ms: Vec<u64> = (0..=40)
            .map(|i| (n as f64).powf(i as f64 / 40.0).round() as u64)
            .chain([d.min(n)])
            .collect();
        ms.sort_unstable();
        ms.dedup();
        grid.extend(ms.into_iter().map(|m| InstanceShape { n, m, d }));
    }
    let rows = emit_bounds_table(&grid, alpha, factors, out)?;
    println!("{} rows -> {}", rows.len(), out.display());
    Ok(())
}

fn verify(seed: u64, replications: u64, workers_req: Option<usize>, out: Option<&Path>) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(workers_req))
        .build()
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let lines = pool.install(|| standard_battery(replications, seed))?;
    let report: String = lines.iter().map(|l| format!("{l}\n")).collect();
    print!("{report}");
    if let Some(path) = out {
        std::fs::write(path, &report).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("{} checks, {failed} failed", lines.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Experiment1(c) => run_specs(builtin_experiment_1(), c).map(|_| true),
        Command::Experiment2(c) => run_specs(builtin_experiment_2(), c).map(|_| true),
        Command::Sweep { config, common } => {
            load_spec(config).and_then(|s| run_specs(vec![s], common)).map(|_| true)
        }
        Command::Bounds { n, d, alpha, factors, out } => bounds(*n, d, *alpha, factors, out).map(|_| true),
        Command::Verify { seed, replications, workers, out } => {
            verify(*seed, *replications, *workers, out.as_deref())
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
