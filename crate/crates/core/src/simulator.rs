//! Monte Carlo estimation of testing risk.
//!
//! Each replication is a pure function of its stream coordinates, so
//! replications run on the current rayon pool and the integer rejection
//! counts are identical for any number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::{
    CountThreshold, LocalObservation, ProblemInstance, Protocol, PublicCoin, TestKind,
    TranscriptVector,
};
use crate::stats::rng::{
    fill_gaussian, fill_rademacher, machine_stream_id, Purpose, RngStream, StreamKey,
};

const NULL: u64 = 0;
const ALTERNATIVE: u64 = 1;

/// The unknown mean vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector(Vec<f64>);

impl SignalVector {
    pub fn new(mu: Vec<f64>) -> Self {
        SignalVector(mu)
    }

    pub fn zero(d: usize) -> Self {
        SignalVector(vec![0.0; d])
    }

    /// `mu = (rho / sqrt(d)) R` with independent Rademacher `R`; `|mu| = rho`.
    pub fn rademacher(rho: f64, d: usize, stream: &RngStream) -> Self {
        let mut mu = vec![0.0; d];
        fill_rademacher(&mut stream.rng(), &mut mu);
        let scale = rho / (d as f64).sqrt();
        mu.iter_mut().for_each(|v| *v *= scale);
        SignalVector(mu)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Fresh `(rho / sqrt(d)) R` in every replication.
    RademacherScaled,
    FixedVector(SignalVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeSpec {
    pub rho: f64,
    pub prior: Prior,
}

impl AlternativeSpec {
    pub fn rademacher(rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("rho must be finite and non-negative, got {rho}")));
        }
        Ok(AlternativeSpec {
            rho,
            prior: Prior::RademacherScaled,
        })
    }

    pub fn fixed(mu: SignalVector) -> Self {
        AlternativeSpec {
            rho: mu.norm(),
            prior: Prior::FixedVector(mu),
        }
    }
}

/// Empirical error rates of one test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub type1: f64,
    pub type2: f64,
    pub tpr: f64,
    pub replications: u64,
    pub std_err_type1: f64,
    pub std_err_type2: f64,
}

fn binomial_std_err(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

impl RiskEstimate {
    pub fn from_counts(null_rejections: u64, alt_rejections: u64, replications: u64) -> Self {
        let n = replications as f64;
        let type1 = null_rejections as f64 / n;
        let tpr = alt_rejections as f64 / n;
        let type2 = (replications - alt_rejections) as f64 / n;
        RiskEstimate {
            type1,
            type2,
            tpr,
            replications,
            std_err_type1: binomial_std_err(type1, replications),
            std_err_type2: binomial_std_err(type2, replications),
        }
    }

    /// `type1 + type2`.
    pub fn risk(&self) -> f64 {
        self.type1 + self.type2
    }

    pub fn risk_std_err(&self) -> f64 {
        self.std_err_type1.hypot(self.std_err_type2)
    }

    pub fn std_err_tpr(&self) -> f64 {
        self.std_err_type2
    }
}

fn check_signal(mu: &[f64], inst: &ProblemInstance) -> Result<()> {
    if mu.len() != inst.d() {
        return Err(Error::DimensionMismatch {
            expected: inst.d(),
            actual: mu.len(),
        });
    }
    Ok(())
}

fn observe_into(obs: &mut LocalObservation, mu: Option<&[f64]>, scale: f64, stream: &RngStream) {
    let x = obs.as_mut_vec();
    fill_gaussian(&mut stream.rng(), x);
    match mu {
        Some(mu) => x.iter_mut().zip(mu).for_each(|(v, m)| *v = m + scale * *v),
        None => x.iter_mut().for_each(|v| *v *= scale),
    }
}

/// `x_j = mu + sqrt(m/n) z_j`, one vector per stream.
pub fn generate_observations(
    mu: &SignalVector,
    inst: &ProblemInstance,
    streams: &[RngStream],
) -> Result<Vec<LocalObservation>> {
    check_signal(mu.as_slice(), inst)?;
    let scale = inst.noise_scale();
    Ok(streams
        .iter()
        .map(|s| {
            let mut obs = LocalObservation::new(vec![0.0; inst.d()]);
            observe_into(&mut obs, Some(mu.as_slice()), scale, s);
            obs
        })
        .collect())
}

/// Risk estimator bound to a seed and a position in an experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulation {
    pub root_seed: u64,
    pub experiment: u64,
    pub grid_index: u64,
    pub rule: CountThreshold,
}

impl Simulation {
    pub fn new(root_seed: u64) -> Self {
        Simulation {
            root_seed,
            experiment: 0,
            grid_index: 0,
            rule: CountThreshold::default(),
        }
    }

    pub fn with_experiment(mut self, id: u64) -> Self {
        self.experiment = id;
        self
    }

    pub fn with_grid_index(mut self, index: u64) -> Self {
        self.grid_index = index;
        self
    }

    pub fn with_rule(mut self, rule: CountThreshold) -> Self {
        self.rule = rule;
        self
    }

    fn key(&self, purpose: Purpose, hypothesis: u64, replication: u64) -> StreamKey {
        StreamKey::new(purpose)
            .experiment(self.experiment)
            .grid_index(self.grid_index)
            .hypothesis(hypothesis)
            .replication(replication)
    }

    fn stream(&self, key: StreamKey) -> RngStream {
        RngStream::from_key(self.root_seed, &key)
    }

    /// Signal used in replication `replication` under the alternative.
    pub fn signal(&self, alt: &AlternativeSpec, d: usize, replication: u64) -> SignalVector {
        match &alt.prior {
            Prior::FixedVector(mu) => mu.clone(),
            Prior::RademacherScaled => {
                let s = self.stream(self.key(Purpose::Signal, ALTERNATIVE, replication));
                SignalVector::rademacher(alt.rho, d, &s)
            }
        }
    }

    /// Public coin of one replication; `None` for tests without a coin.
    pub fn coin(&self, kind: TestKind, d: usize, hypothesis: u64, replication: u64) -> Option<PublicCoin> {
        kind.uses_coin()
            .then(|| PublicCoin::draw(&self.stream(self.key(Purpose::Coin, hypothesis, replication)), d))
    }

    fn round(
        &self,
        protocol: &Protocol,
        mu: Option<&[f64]>,
        hypothesis: u64,
        replication: u64,
        obs: &mut LocalObservation,
    ) -> Result<TranscriptVector> {
        let inst = protocol.instance();
        let kind = protocol.kind();
        let coin = self.coin(kind, inst.d(), hypothesis, replication);
        let scale = inst.noise_scale();
        let noise_prefix = self.key(Purpose::Noise, hypothesis, replication).prefix();
        let local_prefix = self.key(Purpose::LocalTest, hypothesis, replication).prefix();
        let mut bits = vec![false; inst.m() as usize];
        // Machines outside the active set send a constant 0.
        for (j, bit) in bits.iter_mut().enumerate().take(protocol.active_machines()) {
            let noise = RngStream::new(self.root_seed, machine_stream_id(noise_prefix, j as u64));
            observe_into(obs, mu, scale, &noise);
            let local = RngStream::new(self.root_seed, machine_stream_id(local_prefix, j as u64));
            *bit = protocol.local_bit(j, obs, coin.as_ref(), &local)?;
        }
        Ok(TranscriptVector::new(bits, kind.uses_coin()))
    }

    /// Transcript and decision of a single replication.
    pub fn replicate(
        &self,
        protocol: &Protocol,
        alt: Option<&AlternativeSpec>,
        replication: u64,
    ) -> Result<(TranscriptVector, bool)> {
        let d = protocol.instance().d();
        let mut obs = LocalObservation::new(vec![0.0; d]);
        let transcript = match alt {
            None => self.round(protocol, None, NULL, replication, &mut obs)?,
            Some(alt) => {
                let mu = self.signal(alt, d, replication);
                check_signal(mu.as_slice(), protocol.instance())?;
                self.round(protocol, Some(mu.as_slice()), ALTERNATIVE, replication, &mut obs)?
            }
        };
        let decision = protocol.aggregate(&transcript)?;
        Ok((transcript, decision))
    }

    /// Number of rejections in `replications` rounds; `alt = None` simulates the null.
    pub fn count_rejections(
        &self,
        protocol: &Protocol,
        alt: Option<&AlternativeSpec>,
        replications: u64,
    ) -> Result<u64> {
        if let Some(AlternativeSpec {
            prior: Prior::FixedVector(mu),
            ..
        }) = alt
        {
            check_signal(mu.as_slice(), protocol.instance())?;
        }
        let d = protocol.instance().d();
        (0..replications)
            .into_par_iter()
            .map_init(
                || LocalObservation::new(vec![0.0; d]),
                |obs, r| -> Result<u64> {
                    let transcript = match alt {
                        None => self.round(protocol, None, NULL, r, obs)?,
                        Some(alt) => {
                            let mu = self.signal(alt, d, r);
                            self.round(protocol, Some(mu.as_slice()), ALTERNATIVE, r, obs)?
                        }
                    };
                    Ok(u64::from(protocol.aggregate(&transcript)?))
                },
            )
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    pub fn estimate_risk(
        &self,
        kind: TestKind,
        inst: &ProblemInstance,
        alt: &AlternativeSpec,
        replications: u64,
    ) -> Result<RiskEstimate> {
        if replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        let protocol = Protocol::new(kind, *inst, self.rule)?;
        let null = self.count_rejections(&protocol, None, replications)?;
        let hits = self.count_rejections(&protocol, Some(alt), replications)?;
        Ok(RiskEstimate::from_counts(null, hits, replications))
    }
}

/// Risk of `kind` under the null and under `alt`, with exact-binomial
/// aggregation thresholds.
pub fn estimate_risk(
    kind: TestKind,
    inst: &ProblemInstance,
    alt: &AlternativeSpec,
    replications: u64,
    root_seed: u64,
) -> Result<RiskEstimate> {
    Simulation::new(root_seed).estimate_risk(kind, inst, alt, replications)
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid is empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("grid contains a non-finite value".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("grid must be sorted ascending".into()));
    }
    Ok(())
}

/// One risk estimate per signal strength under the Rademacher prior, default
/// simulation settings.
pub fn tpr_curve(
    kind: TestKind,
    inst: &ProblemInstance,
    rho_grid: &[f64],
    replications: u64,
    root_seed: u64,
) -> Result<Vec<(f64, RiskEstimate)>> {
    Simulation::new(root_seed).tpr_curve(kind, inst, rho_grid, replications)
}

impl Simulation {
    /// Every grid point uses its own streams (the grid index is part of the key).
    pub fn tpr_curve(
        &self,
        kind: TestKind,
        inst: &ProblemInstance,
        rho_grid: &[f64],
        replications: u64,
    ) -> Result<Vec<(f64, RiskEstimate)>> {
        check_grid(rho_grid)?;
        rho_grid
            .iter()
            .enumerate()
            .map(|(i, &rho)| {
                let alt = AlternativeSpec::rademacher(rho)?;
                let est = self
                    .with_grid_index(i as u64)
                    .estimate_risk(kind, inst, &alt, replications)?;
                Ok((rho, est))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_signal_has_exact_norm() {
        for (rho, d) in [(0.3, 500), (1.0, 5), (0.0, 7)] {
            let mu = SignalVector::rademacher(rho, d, &RngStream::new(1, 2));
            assert!((mu.norm() - rho).abs() < 1e-12);
            let mag = rho / (d as f64).sqrt();
            assert!(mu.as_slice().iter().all(|v| (v.abs() - mag).abs() < 1e-15));
        }
    }

    #[test]
    fn risk_estimate_arithmetic() {
        let r = RiskEstimate::from_counts(5, 80, 100);
        assert_eq!(r.type1, 0.05);
        assert_eq!(r.tpr, 0.8);
        assert!((r.type2 - 0.2).abs() < 1e-15);
        assert!((r.std_err_type1 - (0.05f64 * 0.95 / 100.0).sqrt()).abs() < 1e-15);
        assert!((r.std_err_type2 - (0.2f64 * 0.8 / 100.0).sqrt()).abs() < 1e-15);
        assert!((r.tpr + r.type2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn observations_have_the_right_shape() {
        let inst = ProblemInstance::new(100, 4, 3, 0.05).unwrap();
        let mu = SignalVector::new(vec![1.0, 2.0, 3.0]);
        let streams: Vec<_> = (0..4).map(|j| RngStream::new(0, j)).collect();
        let obs = generate_observations(&mu, &inst, &streams).unwrap();
        assert_eq!(obs.len(), 4);
        assert!(obs.iter().all(|o| o.len() == 3));
        assert!(generate_observations(&SignalVector::zero(2), &inst, &streams).is_err());
    }

    #[test]
    fn zero_replications_rejected() {
        let inst = ProblemInstance::new(100, 4, 3, 0.05).unwrap();
        let alt = AlternativeSpec::rademacher(0.1).unwrap();
        assert!(estimate_risk(TestKind::ChiSqCount, &inst, &alt, 0, 1).is_err());
        assert!(AlternativeSpec::rademacher(-1.0).is_err());
    }

    #[test]
    fn fixed_vector_dimension_checked() {
        let inst = ProblemInstance::new(100, 4, 3, 0.05).unwrap();
        let alt = AlternativeSpec::fixed(SignalVector::zero(4));
        assert!(estimate_risk(TestKind::ChiSqCount, &inst, &alt, 10, 1).is_err());
    }

    #[test]
    fn grid_validation() {
        let inst = ProblemInstance::new(100, 4, 3, 0.05).unwrap();
        assert!(tpr_curve(TestKind::SignCount, &inst, &[], 10, 0).is_err());
        assert!(tpr_curve(TestKind::SignCount, &inst, &[0.5, 0.1], 10, 0).is_err());
    }

    #[test]
    fn single_machine_sends_only_machine_zero() {
        let inst = ProblemInstance::new(100, 5, 3, 0.05).unwrap();
        let protocol = Protocol::new(TestKind::SingleMachine, inst, CountThreshold::default()).unwrap();
        let alt = AlternativeSpec::rademacher(10.0).unwrap();
        let (t, decision) = Simulation::new(3).replicate(&protocol, Some(&alt), 0).unwrap();
        assert!(t.bits()[1..].iter().all(|b| !b));
        assert_eq!(decision, t.bits()[0]);
        assert!(decision);
    }
}
