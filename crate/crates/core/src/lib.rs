//! One-bit distributed detection of a Gaussian mean.
//!
//! `m` machines each see a local average `X_j = mu + sqrt(m/n) Z_j` of their
//! share of `n` observations and send a single bit to a central aggregator,
//! which decides between `mu = 0` and `|mu| >= rho`. The crate provides
//!
//! * [`protocol`]: the counting tests built on local chi-square and
//!   public-coin sign statistics, and a single-machine baseline;
//! * [`simulator`]: reproducible Monte Carlo estimates of their errors;
//! * [`theory`]: detection rates and risk lower bounds, with Monte Carlo
//!   checks of the inequalities behind them;
//! * [`experiments`]: sweep definitions and their CSV output, used by the
//!   `onebit` binary.
//!
//! ```
//! use onebit::{AlternativeSpec, ProblemInstance, Simulation, TestKind};
//!
//! let inst = ProblemInstance::new(10_000, 5000, 5, 0.05).unwrap();
//! let alt = AlternativeSpec::rademacher(0.2).unwrap();
//! let est = Simulation::new(1).estimate_risk(TestKind::SignCount, &inst, &alt, 50).unwrap();
//! assert!(est.tpr > est.type1);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod protocol;
pub mod simulator;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use protocol::{
    CountThreshold, LocalObservation, ProblemInstance, Protocol, PublicCoin, TestKind, Thresholds,
    TranscriptVector,
};
pub use simulator::{AlternativeSpec, Prior, RiskEstimate, SignalVector, Simulation};
pub use stats::{ChiSquareParams, RngStream};
pub use experiments::{CsvRow, ExperimentSpec, InstanceRule, Sweep};
pub use theory::{detection_threshold, risk_lower_bound, BoundInputs};
