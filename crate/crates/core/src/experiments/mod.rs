//! Experiment drivers: sweep specs, the runner that turns them into CSV
//! rows, and tabulated theoretical bounds.

pub mod bounds_table;
pub mod config;
pub mod run;
pub mod spec;
pub mod verification;

pub use bounds_table::{bounds_rows, emit_bounds_table, BoundsRow, InstanceShape};
pub use config::{load_spec, parse_spec};
pub use run::{
    compute_experiment, evaluate_point, experiment_id, meta_path, read_csv, run_experiment,
    to_csv_string, write_csv, CsvRow, ExperimentOutput, RunSummary,
};
pub use spec::{
    builtin_experiment_1, builtin_experiment_2, ExperimentSpec, GridPoint, InstanceRule, Sweep,
    DEFAULT_SEED,
};
pub use verification::{standard_battery, CheckLine};
