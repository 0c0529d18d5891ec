//! One-bit distributed tests for `H0: mu = 0`.
//!
//! Machine `j` observes `X_j = mu + sqrt(m/n) Z_j` and sends a single bit to a
//! central aggregator. Three protocols are provided:
//!
//! * [`TestKind::ChiSqCount`]: each machine computes `S_j = (n/m) |X_j|^2`,
//!   sends a `Ber(F_{chi2_d}(S_j))` bit, and the aggregator rejects when
//!   `|sum_j (bit_j - 1/2)|` is large. No public coin.
//! * [`TestKind::SignCount`]: all machines share a public coin `U ~ N(0, I_d)`
//!   and send `1{<U, X_j> >= 0}`; aggregated the same way.
//! * [`TestKind::SingleMachine`]: machine 1 runs the classical centred
//!   chi-square test on its own data and forwards its decision.
//!
//! The aggregator only ever sees a [`TranscriptVector`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::stats::rng::{fill_gaussian, sample_bernoulli, RngStream};
use crate::stats::special::{ln_gamma, ChiSquareCdf};

/// Sizes and level of one testing problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemInstance {
    n: u64,
    m: u64,
    d: usize,
    alpha: f64,
}

impl ProblemInstance {
    pub fn new(n: u64, m: u64, d: usize, alpha: f64) -> Result<Self> {
        if n == 0 || m == 0 || d == 0 {
            return Err(Error::InvalidInstance(format!(
                "n, m and d must be positive (n={n}, m={m}, d={d})"
            )));
        }
        if m > n {
            return Err(Error::InvalidInstance(format!(
                "more machines than observations (m={m} > n={n})"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInstance(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(ProblemInstance { n, m, d, alpha })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Standard deviation `sqrt(m/n)` of each local noise coordinate.
    pub fn noise_scale(&self) -> f64 {
        (self.m as f64 / self.n as f64).sqrt()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.d,
                actual: len,
            })
        }
    }
}

/// Level-dependent constants of the three tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// `sqrt(3 log(4/alpha))`, used by the chi-square counting test.
    pub kappa_bar: f64,
    /// `sqrt(log(16/alpha) / 3)`, used by the sign counting test.
    pub kappa_tilde: f64,
    /// `2 / sqrt(alpha)`, used by the single-machine test.
    pub kappa: f64,
}

impl Thresholds {
    pub fn for_level(alpha: f64) -> Self {
        Thresholds {
            kappa_bar: (3.0 * (4.0 / alpha).ln()).sqrt(),
            kappa_tilde: ((16.0 / alpha).ln() / 3.0).sqrt(),
            kappa: 2.0 / alpha.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestKind {
    ChiSqCount,
    SignCount,
    SingleMachine,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [TestKind::ChiSqCount, TestKind::SignCount, TestKind::SingleMachine];

    pub fn name(&self) -> &'static str {
        match self {
            TestKind::ChiSqCount => "ChiSqCount",
            TestKind::SignCount => "SignCount",
            TestKind::SingleMachine => "SingleMachine",
        }
    }

    pub fn uses_coin(&self) -> bool {
        matches!(self, TestKind::SignCount)
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ChiSqCount" | "chisq" => Ok(TestKind::ChiSqCount),
            "SignCount" | "sign" => Ok(TestKind::SignCount),
            "SingleMachine" | "single" => Ok(TestKind::SingleMachine),
            other => Err(Error::InvalidSpec(format!("unknown test kind `{other}`"))),
        }
    }
}

/// How the aggregator of a counting test picks its rejection threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountThreshold {
    /// `sqrt(m) * kappa_bar` or `sqrt(m) * kappa_tilde`. Level is guaranteed
    /// by a Chernoff bound, but the test is conservative: for
    /// `m < 4 kappa^2` it can never reject.
    Theoretical,
    /// Smallest deviation whose two-sided `Bin(m, 1/2)` tail is at most
    /// alpha. Under the null both counting tests send i.i.d. fair bits, so
    /// this has exact level.
    #[default]
    ExactBinomial,
}

impl CountThreshold {
    pub fn name(&self) -> &'static str {
        match self {
            CountThreshold::Theoretical => "theoretical",
            CountThreshold::ExactBinomial => "exact_binomial",
        }
    }
}

impl FromStr for CountThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "theoretical" => Ok(CountThreshold::Theoretical),
            "exact_binomial" => Ok(CountThreshold::ExactBinomial),
            other => Err(Error::InvalidSpec(format!("unknown threshold rule `{other}`"))),
        }
    }
}

/// Smallest `t` with `P(|B - m/2| >= t) <= alpha` for `B ~ Bin(m, 1/2)`.
///
/// Returns `m/2 + 1` (unreachable) when even the most extreme outcome is
/// too likely.
pub fn binomial_critical_deviation(m: u64, alpha: f64) -> f64 {
    let half = m as f64 / 2.0;
    let ln_norm = ln_gamma(m as f64 + 1.0) - m as f64 * std::f64::consts::LN_2;
    let mut lower_tail = 0.0;
    let mut best = half + 1.0;
    for k in 0..=(m / 2) {
        let deviation = half - k as f64;
        if deviation <= 0.0 {
            break;
        }
        let ln_pmf = ln_norm - ln_gamma(k as f64 + 1.0) - ln_gamma((m - k) as f64 + 1.0);
        lower_tail += ln_pmf.exp();
        if 2.0 * lower_tail <= alpha {
            best = deviation;
        } else {
            break;
        }
    }
    best
}

/// Shared standard normal vector available to every machine.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicCoin {
    u: Vec<f64>,
}

impl PublicCoin {
    pub fn draw(stream: &RngStream, d: usize) -> Self {
        let mut u = vec![0.0; d];
        fill_gaussian(&mut stream.rng(), &mut u);
        PublicCoin { u }
    }

    pub fn from_vec(u: Vec<f64>) -> Self {
        PublicCoin { u }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Data held by one machine.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalObservation {
    x: Vec<f64>,
}

impl LocalObservation {
    pub fn new(x: Vec<f64>) -> Self {
        LocalObservation { x }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub(crate) fn as_mut_vec(&mut self) -> &mut Vec<f64> {
        &mut self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn squared_norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

/// The bits received by the aggregator, one per machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TranscriptVector {
    bits: Vec<bool>,
    coin_used: bool,
}

impl TranscriptVector {
    pub fn new(bits: Vec<bool>, coin_used: bool) -> Self {
        TranscriptVector { bits, coin_used }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn coin_used(&self) -> bool {
        self.coin_used
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `sum_j (bit_j - 1/2)`.
    pub fn centred_sum(&self) -> f64 {
        self.ones() as f64 - self.bits.len() as f64 / 2.0
    }
}

/// `(n/m) |x|^2`; chi-square with `d` degrees of freedom under the null.
pub fn local_stat_chisq(obs: &LocalObservation, inst: &ProblemInstance) -> Result<f64> {
    inst.check_dim(obs.len())?;
    Ok(inst.n as f64 / inst.m as f64 * obs.squared_norm())
}

/// Randomized local chi-square test: a `Ber(F_{chi2_d}(stat))` draw.
pub fn local_test_chisq(stat: f64, inst: &ProblemInstance, stream: &RngStream) -> Result<bool> {
    let cdf = ChiSquareCdf::new(inst.d as u64)?;
    sample_bernoulli(&mut stream.rng(), cdf.cdf(stat)?)
}

/// `1{ sqrt(n/(m d)) <u, x> >= 0 }`.
pub fn local_test_sign(
    obs: &LocalObservation,
    coin: &PublicCoin,
    inst: &ProblemInstance,
) -> Result<bool> {
    inst.check_dim(obs.len())?;
    inst.check_dim(coin.len())?;
    let dot: f64 = obs.x.iter().zip(&coin.u).map(|(a, b)| a * b).sum();
    let scale = (inst.n as f64 / (inst.m as f64 * inst.d as f64)).sqrt();
    Ok(scale * dot >= 0.0)
}

/// Rejects iff `|sum_j (bit_j - 1/2)| >= threshold`.
pub fn aggregate_counting(transcript: &TranscriptVector, threshold: f64) -> Result<bool> {
    if transcript.is_empty() {
        return Err(Error::Protocol("cannot aggregate an empty transcript".into()));
    }
    Ok(transcript.centred_sum().abs() >= threshold)
}

/// Classical test on machine 1: `(n / (sqrt(d) m)) |x|^2 - sqrt(d) >= kappa`.
pub fn test_single_machine(
    obs: &LocalObservation,
    inst: &ProblemInstance,
    thr: &Thresholds,
) -> Result<bool> {
    inst.check_dim(obs.len())?;
    let sqrt_d = (inst.d as f64).sqrt();
    let stat = inst.n as f64 / (sqrt_d * inst.m as f64) * obs.squared_norm() - sqrt_d;
    Ok(stat >= thr.kappa)
}

/// Practical regime rule: one machine runs the classical test, `m <= d`
/// counts chi-square bits, `m > d` counts public-coin signs.
pub fn select_regime(inst: &ProblemInstance) -> TestKind {
    if inst.m == 1 {
        TestKind::SingleMachine
    } else if inst.m as usize <= inst.d {
        TestKind::ChiSqCount
    } else {
        TestKind::SignCount
    }
}

/// Outcome of one protocol round.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub transcript: TranscriptVector,
    pub decision: bool,
    /// A coin was supplied to a protocol that does not read it.
    pub coin_ignored: bool,
}

/// A test kind bound to an instance and an aggregation threshold.
#[derive(Debug, Clone)]
pub struct Protocol {
    kind: TestKind,
    inst: ProblemInstance,
    thresholds: Thresholds,
    rule: CountThreshold,
    count_threshold: f64,
    cdf: ChiSquareCdf,
}

impl Protocol {
    pub fn new(kind: TestKind, inst: ProblemInstance, rule: CountThreshold) -> Result<Self> {
        let thresholds = Thresholds::for_level(inst.alpha);
        let m = inst.m as f64;
        let count_threshold = match (rule, kind) {
            (_, TestKind::SingleMachine) => f64::NAN,
            (CountThreshold::Theoretical, TestKind::ChiSqCount) => m.sqrt() * thresholds.kappa_bar,
            (CountThreshold::Theoretical, TestKind::SignCount) => m.sqrt() * thresholds.kappa_tilde,
            (CountThreshold::ExactBinomial, _) => binomial_critical_deviation(inst.m, inst.alpha),
        };
        Ok(Protocol {
            kind,
            inst,
            thresholds,
            rule,
            count_threshold,
            cdf: ChiSquareCdf::new(inst.d as u64)?,
        })
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn rule(&self) -> CountThreshold {
        self.rule
    }

    /// Threshold on `|sum_j (bit_j - 1/2)|`; NaN for the single-machine test.
    pub fn count_threshold(&self) -> f64 {
        self.count_threshold
    }

    /// Machines that take part; the single-machine test only involves machine 0.
    pub fn active_machines(&self) -> usize {
        match self.kind {
            TestKind::SingleMachine => 1,
            _ => self.inst.m as usize,
        }
    }

    /// The bit machine `machine` sends, computed from its own data only.
    pub fn local_bit(
        &self,
        machine: usize,
        obs: &LocalObservation,
        coin: Option<&PublicCoin>,
        stream: &RngStream,
    ) -> Result<bool> {
        match self.kind {
            TestKind::ChiSqCount => {
                let stat = local_stat_chisq(obs, &self.inst)?;
                let p = self.cdf.cdf(stat)?;
                Ok(stream.rng().random::<f64>() < p)
            }
            TestKind::SignCount => {
                let coin = coin.ok_or_else(|| {
                    Error::Protocol("SignCount needs a public coin".into())
                })?;
                local_test_sign(obs, coin, &self.inst)
            }
            TestKind::SingleMachine if machine == 0 => {
                test_single_machine(obs, &self.inst, &self.thresholds)
            }
            TestKind::SingleMachine => Ok(false),
        }
    }

    pub fn aggregate(&self, transcript: &TranscriptVector) -> Result<bool> {
        if transcript.len() != self.inst.m as usize {
            return Err(Error::Protocol(format!(
                "expected {} transcript bits, got {}",
                self.inst.m,
                transcript.len()
            )));
        }
        match self.kind {
            TestKind::SingleMachine => Ok(transcript.bits[0]),
            _ => aggregate_counting(transcript, self.count_threshold),
        }
    }

    pub fn run(
        &self,
        observations: &[LocalObservation],
        coin: Option<&PublicCoin>,
        streams: &[RngStream],
    ) -> Result<ProtocolRun> {
        let m = self.inst.m as usize;
        if observations.len() != m {
            return Err(Error::Protocol(format!(
                "expected {m} observations, got {}",
                observations.len()
            )));
        }
        if streams.len() != m {
            return Err(Error::Protocol(format!("expected {m} streams, got {}", streams.len())));
        }
        if self.kind.uses_coin() && coin.is_none() {
            return Err(Error::Protocol("SignCount needs a public coin".into()));
        }
        let coin_ignored = !self.kind.uses_coin() && coin.is_some();
        let coin = if self.kind.uses_coin() { coin } else { None };

        let bits = observations
            .iter()
            .zip(streams)
            .enumerate()
            .map(|(j, (obs, stream))| self.local_bit(j, obs, coin, stream))
            .collect::<Result<Vec<_>>>()?;
        let transcript = TranscriptVector::new(bits, self.kind.uses_coin());
        let decision = self.aggregate(&transcript)?;
        Ok(ProtocolRun {
            transcript,
            decision,
            coin_ignored,
        })
    }
}

/// One round of `kind` with the theoretical thresholds.
pub fn run_protocol(
    kind: TestKind,
    observations: &[LocalObservation],
    coin: Option<&PublicCoin>,
    inst: &ProblemInstance,
    streams: &[RngStream],
) -> Result<ProtocolRun> {
    Protocol::new(kind, *inst, CountThreshold::Theoretical)?.run(observations, coin, streams)
}
