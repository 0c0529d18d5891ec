//! Running a sweep and writing its CSV and metadata files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::spec::{ExperimentSpec, GridPoint};
use crate::error::{Error, Result};
use crate::protocol::{ProblemInstance, TestKind};
use crate::simulator::{AlternativeSpec, Simulation};
use crate::stats::rng::stable_hash;

/// Seventeen significant digits, enough to round-trip any `f64`.
fn sci<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.16e}"))
}

/// One line of experiment output: a single test at a single grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub test_kind: String,
    #[serde(serialize_with = "sci")]
    pub grid_value: f64,
    pub n: u64,
    pub m: u64,
    pub d: u64,
    #[serde(serialize_with = "sci")]
    pub rho: f64,
    #[serde(serialize_with = "sci")]
    pub type1: f64,
    #[serde(serialize_with = "sci")]
    pub type2: f64,
    #[serde(serialize_with = "sci")]
    pub tpr: f64,
    #[serde(serialize_with = "sci")]
    pub stderr_tpr: f64,
    pub replications: u64,
    pub seed: u64,
}

/// Stream namespace of an experiment.
pub fn experiment_id(name: &str) -> u64 {
    stable_hash(name.as_bytes())
}

/// Rows of a sweep, computed on the current rayon pool.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<CsvRow>,
    /// Grid values whose instance was out of domain.
    pub skipped: Vec<f64>,
}

pub fn evaluate_point(spec: &ExperimentSpec, point: &GridPoint, kind: TestKind) -> Result<CsvRow> {
    let inst = ProblemInstance::new(point.n, point.m, point.d, spec.alpha)?;
    let alt = AlternativeSpec::rademacher(point.rho)?;
    let est = Simulation::new(spec.root_seed)
        .with_experiment(experiment_id(&spec.name))
        .with_grid_index(point.index as u64)
        .with_rule(spec.threshold_rule)
        .estimate_risk(kind, &inst, &alt, spec.replications)?;
    Ok(CsvRow {
        experiment: spec.name.clone(),
        test_kind: kind.name().to_string(),
        grid_value: point.value,
        n: point.n,
        m: point.m,
        d: point.d as u64,
        rho: point.rho,
        type1: est.type1,
        type2: est.type2,
        tpr: est.tpr,
        stderr_tpr: est.std_err_tpr(),
        replications: spec.replications,
        seed: spec.root_seed,
    })
}

pub fn compute_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let (points, skipped) = spec.grid();
    let kinds = spec.sorted_tests();
    let jobs: Vec<(&GridPoint, TestKind)> = points
        .iter()
        .flat_map(|p| kinds.iter().map(move |&k| (p, k)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(p, k)| evaluate_point(spec, p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput { rows, skipped })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

/// Header first, comma separated, LF line endings.
pub fn write_csv(rows: &[CsvRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn to_csv_string(rows: &[CsvRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_err(Path::new("<memory>")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<memory>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().map(|row| row.map_err(csv_err(path))).collect()
}

/// Where the metadata of `csv_path` goes: the same path with `.meta` appended.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    let mut os = csv_path.as_os_str().to_owned();
    os.push(".meta");
    PathBuf::from(os)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub rows: usize,
    pub skipped: Vec<f64>,
    pub wall_time_secs: f64,
}

fn render_meta(spec: &ExperimentSpec, workers: usize, out: &ExperimentOutput, secs: f64) -> String {
    let join = |v: Vec<String>| if v.is_empty() { "none".to_string() } else { v.join(",") };
    let tests = spec.tests.iter().map(|k| k.name().to_string()).collect();
    let skipped = out.skipped.iter().map(|v| v.to_string()).collect();
    let mut s = String::new();
    let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
    kv("name", spec.name.clone());
    kv("sweep", spec.sweep.to_string());
    kv("instance_rule", spec.instance_rule.to_string());
    kv("tests", join(tests));
    kv("replications", spec.replications.to_string());
    kv("alpha", spec.alpha.to_string());
    kv("threshold_rule", spec.threshold_rule.name().to_string());
    kv("root_seed", spec.root_seed.to_string());
    kv("experiment_id", experiment_id(&spec.name).to_string());
    kv("version", env!("CARGO_PKG_VERSION").to_string());
    kv(
        "timestamp",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    );
    kv("workers", workers.to_string());
    kv("wall_time_seconds", format!("{secs:.3}"));
    kv("rows", out.rows.len().to_string());
    kv("skipped_grid_values", join(skipped));
    // the driver only draws a coin for tests that read it
    kv("coin_ignored", "false".to_string());
    s
}

/// Runs `spec` on a pool of `workers` threads and writes `csv_path` plus
/// its `.meta` companion. The CSV bytes do not depend on `workers`.
pub fn run_experiment(spec: &ExperimentSpec, csv_path: &Path, workers: usize) -> Result<RunSummary> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::InvalidSpec("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let out = pool.install(|| compute_experiment(spec))?;
    let secs = start.elapsed().as_secs_f64();
    write_csv(&out.rows, csv_path)?;
    let meta = meta_path(csv_path);
    std::fs::write(&meta, render_meta(spec, workers, &out, secs)).map_err(|e| Error::io(&meta, e))?;
    Ok(RunSummary {
        csv_path: csv_path.to_path_buf(),
        meta_path: meta,
        rows: out.rows.len(),
        skipped: out.skipped,
        wall_time_secs: secs,
    })
}
