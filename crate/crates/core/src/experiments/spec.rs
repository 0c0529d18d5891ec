//! Sweep descriptions and the rules that turn a grid value into a problem
//! instance.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::protocol::{CountThreshold, ProblemInstance, TestKind};

pub const DEFAULT_SEED: u64 = 20_240_117;

/// The swept variable and its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    /// `points` equispaced signal sizes on `[lo, hi]`.
    RhoGrid { lo: f64, hi: f64, points: usize },
    /// `points` log-spaced sample sizes on `[lo, hi]`, rounded to integers.
    /// Rounding can merge neighbours; duplicates are dropped.
    NGrid { lo: f64, hi: f64, points: usize },
}

fn spaced(points: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    if points == 1 {
        return vec![f(0.0)];
    }
    (0..points).map(|i| f(i as f64 / (points - 1) as f64)).collect()
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Sweep::RhoGrid { lo, hi, points } => {
                let mut v = spaced(points, |t| lo + (hi - lo) * t);
                // keep the right endpoint exact
                if let Some(last) = v.last_mut() {
                    if points > 1 {
                        *last = hi;
                    }
                }
                v
            }
            Sweep::NGrid { lo, hi, points } => {
                let (a, b) = (lo.ln(), hi.ln());
                let mut v = spaced(points, |t| (a + (b - a) * t).exp().round());
                v.dedup();
                v
            }
        }
    }

    pub fn variable(&self) -> &'static str {
        match self {
            Sweep::RhoGrid { .. } => "rho",
            Sweep::NGrid { .. } => "n",
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi, points) = match *self {
            Sweep::RhoGrid { lo, hi, points } | Sweep::NGrid { lo, hi, points } => (lo, hi, points),
        };
        if points == 0 {
            return Err(Error::InvalidSpec("grid needs at least one point".into()));
        }
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidSpec(format!("bad grid range [{lo}, {hi}]")));
        }
        match self {
            Sweep::RhoGrid { .. } if lo < 0.0 => {
                Err(Error::InvalidSpec(format!("rho grid must be non-negative, got lo = {lo}")))
            }
            Sweep::NGrid { .. } if lo < 1.0 => {
                Err(Error::InvalidSpec(format!("n grid must start at 1 or above, got lo = {lo}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sweep::RhoGrid { lo, hi, points } => write!(f, "rho linear [{lo}, {hi}] x {points}"),
            Sweep::NGrid { lo, hi, points } => write!(f, "n log [{lo}, {hi}] x {points}"),
        }
    }
}

/// How `(n, m, d, rho)` follow from the grid value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceRule {
    /// Fixed `(n, m, d)`; the grid value is `rho`.
    Fixed { n: u64, m: u64, d: usize },
    /// Grid value `n`, `d = round(n^{2/3})`, fixed `m`,
    /// `rho = ln(d) (d m)^{1/4} / sqrt(n)`.
    DimensionGrowth { m: u64 },
    /// Grid value `n`, `m = round(fraction n)`, fixed `d`,
    /// `rho = 2 ln(m) sqrt(d / n)`.
    MachineGrowth { d: usize, fraction: f64 },
}

/// A fully resolved grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub value: f64,
    pub n: u64,
    pub m: u64,
    pub d: usize,
    pub rho: f64,
}

impl InstanceRule {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceRule::Fixed { .. } => "fixed",
            InstanceRule::DimensionGrowth { .. } => "dimension_growth",
            InstanceRule::MachineGrowth { .. } => "machine_growth",
        }
    }

    /// `None` when the value gives `m > n` or `m < 1`.
    pub fn resolve(&self, index: usize, value: f64) -> Option<GridPoint> {
        let (n, m, d, rho) = match *self {
            InstanceRule::Fixed { n, m, d } => (n, m, d, value),
            InstanceRule::DimensionGrowth { m } => {
                let n = value as u64;
                let d = (value.powf(2.0 / 3.0).round() as usize).max(1);
                let rho = (d as f64).ln() * (d as f64 * m as f64).powf(0.25) / value.sqrt();
                (n, m, d, rho)
            }
            InstanceRule::MachineGrowth { d, fraction } => {
                let n = value as u64;
                let m = (value * fraction).round() as u64;
                let rho = 2.0 * (m as f64).ln() * (d as f64 / value).sqrt();
                (n, m, d, rho)
            }
        };
        (m >= 1 && m <= n).then_some(GridPoint { index, value, n, m, d, rho })
    }

    fn validate(&self, sweep: &Sweep) -> Result<()> {
        match (self, sweep) {
            (InstanceRule::Fixed { n, m, d }, Sweep::RhoGrid { .. }) => {
                ProblemInstance::new(*n, *m, *d, 0.5)
                    .map(|_| ())
                    .map_err(|e| Error::InvalidSpec(e.to_string()))
            }
            (InstanceRule::DimensionGrowth { m }, Sweep::NGrid { .. }) if *m >= 1 => Ok(()),
            (InstanceRule::MachineGrowth { d, fraction }, Sweep::NGrid { .. })
                if *d >= 1 && *fraction > 0.0 && *fraction <= 1.0 =>
            {
                Ok(())
            }
            (InstanceRule::Fixed { .. }, _) => {
                Err(Error::InvalidSpec("fixed instances need a rho grid".into()))
            }
            (_, Sweep::RhoGrid { .. }) => {
                Err(Error::InvalidSpec(format!("`{}` needs an n grid", self.name())))
            }
            _ => Err(Error::InvalidSpec(format!("bad parameters for `{}`: {self:?}", self.name()))),
        }
    }
}

impl fmt::Display for InstanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceRule::Fixed { n, m, d } => write!(f, "fixed n={n} m={m} d={d}"),
            InstanceRule::DimensionGrowth { m } => write!(f, "dimension_growth m={m}"),
            InstanceRule::MachineGrowth { d, fraction } => {
                write!(f, "machine_growth d={d} fraction={fraction}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub sweep: Sweep,
    pub instance_rule: InstanceRule,
    pub tests: Vec<TestKind>,
    pub replications: u64,
    pub alpha: f64,
    pub root_seed: u64,
    pub threshold_rule: CountThreshold,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::InvalidSpec("name must not be empty".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSpec("replications must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.tests.is_empty() {
            return Err(Error::InvalidSpec("at least one test kind is required".into()));
        }
        if self.tests.iter().collect::<BTreeSet<_>>().len() != self.tests.len() {
            return Err(Error::InvalidSpec("test kinds must be distinct".into()));
        }
        self.sweep.validate()?;
        self.instance_rule.validate(&self.sweep)
    }

    /// Resolved grid points and the grid values that were skipped.
    pub fn grid(&self) -> (Vec<GridPoint>, Vec<f64>) {
        let mut points = Vec::new();
        let mut skipped = Vec::new();
        for (i, v) in self.sweep.values().into_iter().enumerate() {
            match self.instance_rule.resolve(i, v) {
                Some(p) => points.push(p),
                None => skipped.push(v),
            }
        }
        (points, skipped)
    }

    /// Test kinds in output order.
    pub fn sorted_tests(&self) -> Vec<TestKind> {
        let mut t = self.tests.clone();
        t.sort_by_key(|k| k.name());
        t
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.root_seed = seed;
        self
    }

    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications;
        self
    }
}

/// The two fixed-`n` signal-size sweeps: `(m, d) = (50, 500)` and `(5000, 5)`.
pub fn builtin_experiment_1() -> Vec<ExperimentSpec> {
    [(50, 500), (5000, 5)]
        .into_iter()
        .map(|(m, d)| ExperimentSpec {
            name: format!("experiment1_m{m}_d{d}"),
            sweep: Sweep::RhoGrid { lo: 0.0, hi: 1.0, points: 101 },
            instance_rule: InstanceRule::Fixed { n: 10_000, m, d },
            tests: vec![TestKind::ChiSqCount, TestKind::SignCount],
            replications: 100,
            alpha: 0.05,
            root_seed: DEFAULT_SEED,
            threshold_rule: CountThreshold::ExactBinomial,
        })
        .collect()
}

/// The two growing-`n` scenarios: `d = n^{2/3}, m = 500` and `m = n/10, d = 5`.
pub fn builtin_experiment_2() -> Vec<ExperimentSpec> {
    let sweep = Sweep::NGrid { lo: 1e2, hi: 3e4, points: 60 };
    [
        ("experiment2_dimension_growth", InstanceRule::DimensionGrowth { m: 500 }),
        ("experiment2_machine_growth", InstanceRule::MachineGrowth { d: 5, fraction: 0.1 }),
    ]
    .into_iter()
    .map(|(name, instance_rule)| ExperimentSpec {
        name: name.to_string(),
        sweep,
        instance_rule,
        tests: vec![TestKind::ChiSqCount, TestKind::SignCount],
        replications: 100,
        alpha: 0.05,
        root_seed: DEFAULT_SEED,
        threshold_rule: CountThreshold::ExactBinomial,
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_1_shape() {
        let specs = builtin_experiment_1();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].instance_rule, InstanceRule::Fixed { n: 10_000, m: 50, d: 500 });
        assert_eq!(specs[1].instance_rule, InstanceRule::Fixed { n: 10_000, m: 5000, d: 5 });
        for s in &specs {
            s.validate().unwrap();
            assert_eq!(s.replications, 100);
            let v = s.sweep.values();
            assert_eq!(v.len(), 101);
            assert_eq!((v[0], v[100]), (0.0, 1.0));
            assert!((v[30] - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_growth_at_ten_thousand() {
        let p = InstanceRule::DimensionGrowth { m: 500 }.resolve(0, 1e4).unwrap();
        assert_eq!((p.n, p.m, p.d), (10_000, 500, 464));
        assert!((p.rho - 1.348).abs() < 1e-3, "{}", p.rho);
    }

    #[test]
    fn machine_growth_at_ten_thousand() {
        let rule = InstanceRule::MachineGrowth { d: 5, fraction: 0.1 };
        let p = rule.resolve(0, 1e4).unwrap();
        assert_eq!((p.n, p.m, p.d), (10_000, 1000, 5));
        assert!((p.rho - 0.3089).abs() < 1e-4, "{}", p.rho);
        assert!(rule.resolve(0, 4.0).is_none());
        assert!(rule.resolve(0, 9.0).is_some());
    }

    #[test]
    fn experiment_2_grid() {
        for s in builtin_experiment_2() {
            s.validate().unwrap();
            let v = s.sweep.values();
            assert_eq!(v.len(), 60);
            assert_eq!((v[0], v[59]), (100.0, 30_000.0));
            assert!(v.windows(2).all(|w| w[0] < w[1]));
        }
        // m = 500 exceeds n below 500
        let (points, skipped) = builtin_experiment_2()[0].grid();
        assert!(skipped.iter().all(|&n| n < 500.0));
        assert!(points.iter().all(|p| p.m <= p.n));
        assert!(!skipped.is_empty());
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = builtin_experiment_1().remove(0);
        let bad = [
            ExperimentSpec { replications: 0, ..base.clone() },
            ExperimentSpec { alpha: 1.0, ..base.clone() },
            ExperimentSpec { tests: vec![], ..base.clone() },
            ExperimentSpec { tests: vec![TestKind::SignCount; 2], ..base.clone() },
            ExperimentSpec { name: " ".into(), ..base.clone() },
            ExperimentSpec { sweep: Sweep::RhoGrid { lo: 1.0, hi: 0.0, points: 3 }, ..base.clone() },
            ExperimentSpec { sweep: Sweep::NGrid { lo: 1.0, hi: 10.0, points: 3 }, ..base.clone() },
            ExperimentSpec { instance_rule: InstanceRule::Fixed { n: 10, m: 11, d: 1 }, ..base.clone() },
        ];
        for spec in bad {
            assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn output_order_is_by_name() {
        let mut s = builtin_experiment_1().remove(0);
        s.tests = vec![TestKind::SingleMachine, TestKind::SignCount, TestKind::ChiSqCount];
        let names: Vec<_> = s.sorted_tests().iter().map(|k| k.name()).collect();
        assert_eq!(names, ["ChiSqCount", "SignCount", "SingleMachine"]);
    }
}
