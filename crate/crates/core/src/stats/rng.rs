//! Seedable random streams and the samplers built on them.
//!
//! Every random quantity in a simulation is drawn from an [`RngStream`], a
//! plain `(root_seed, stream_id)` pair. The generator behind a stream is a
//! 128-bit multiplicative PCG whose state is obtained by hashing both halves,
//! so a stream always replays the same sequence and two streams with distinct
//! ids behave as independent generators. Streams are `Copy` and can be handed
//! to any thread; nothing is shared between them.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rand_pcg::Pcg64Mcg;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(acc: u64, value: u64) -> u64 {
    mix64(acc.rotate_left(23) ^ mix64(value.wrapping_add(GOLDEN_GAMMA)))
}

/// Stable 64-bit FNV-1a hash, used to turn experiment names into stream ids.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// What a stream is used for. Part of the stream-id derivation so that, for
/// example, the noise of machine `j` and its local randomization never share
/// a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Noise,
    LocalTest,
    Coin,
    Signal,
    Verifier,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Noise => 1,
            Purpose::LocalTest => 2,
            Purpose::Coin => 3,
            Purpose::Signal => 4,
            Purpose::Verifier => 5,
        }
    }
}

/// Coordinates of a stream inside an experiment.
///
/// The derived id depends on every field, so results do not depend on the
/// order in which replications or machines are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub experiment: u64,
    pub grid_index: u64,
    pub hypothesis: u64,
    pub replication: u64,
    pub machine: u64,
    pub purpose: Purpose,
}

impl StreamKey {
    pub fn new(purpose: Purpose) -> Self {
        StreamKey {
            experiment: 0,
            grid_index: 0,
            hypothesis: 0,
            replication: 0,
            machine: 0,
            purpose,
        }
    }

    pub fn experiment(mut self, id: u64) -> Self {
        self.experiment = id;
        self
    }

    pub fn grid_index(mut self, index: u64) -> Self {
        self.grid_index = index;
        self
    }

    pub fn hypothesis(mut self, h: u64) -> Self {
        self.hypothesis = h;
        self
    }

    pub fn replication(mut self, r: u64) -> Self {
        self.replication = r;
        self
    }

    pub fn machine(mut self, j: u64) -> Self {
        self.machine = j;
        self
    }

    /// Hash of every field except the machine index.
    pub fn prefix(&self) -> u64 {
        [
            self.experiment,
            self.grid_index,
            self.hypothesis,
            self.replication,
            self.purpose.tag(),
        ]
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &v| absorb(acc, v))
    }

    pub fn stream_id(&self) -> u64 {
        machine_stream_id(self.prefix(), self.machine)
    }
}

/// Completes a [`StreamKey::prefix`] with a machine index. Lets a round hash
/// its replication coordinates once and derive every machine's id cheaply.
#[inline]
pub fn machine_stream_id(prefix: u64, machine: u64) -> u64 {
    absorb(prefix, machine)
}

/// A reproducible random stream identified by `(root_seed, stream_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub root_seed: u64,
    pub stream_id: u64,
}

pub type StreamRng = Pcg64Mcg;

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        RngStream {
            root_seed,
            stream_id,
        }
    }

    pub fn from_key(root_seed: u64, key: &StreamKey) -> Self {
        Self::new(root_seed, key.stream_id())
    }

    /// Child stream for the `index`-th work item of this stream.
    pub fn substream(&self, index: u64) -> Self {
        Self::new(self.root_seed, absorb(absorb(self.stream_id, 0x5eed), index))
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let hi = mix64(self.root_seed ^ GOLDEN_GAMMA);
        let lo = absorb(hi, self.stream_id);
        let hi = absorb(lo, hi);
        Pcg64Mcg::new((u128::from(hi) << 64) | u128::from(lo))
    }
}

/// Parameters of a (noncentral) chi-square law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareParams {
    dof: u64,
    noncentrality: f64,
}

impl ChiSquareParams {
    pub fn new(dof: u64, noncentrality: f64) -> Result<Self> {
        if dof == 0 {
            return Err(Error::Domain("chi-square needs at least one degree of freedom".into()));
        }
        if !(noncentrality >= 0.0) || !noncentrality.is_finite() {
            return Err(Error::Domain(format!(
                "noncentrality must be finite and non-negative, got {noncentrality}"
            )));
        }
        Ok(ChiSquareParams { dof, noncentrality })
    }

    pub fn central(dof: u64) -> Result<Self> {
        Self::new(dof, 0.0)
    }

    pub fn dof(&self) -> u64 {
        self.dof
    }

    pub fn noncentrality(&self) -> f64 {
        self.noncentrality
    }
}

pub fn fill_gaussian<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// `dim` i.i.d. standard normal draws from the start of `stream`.
pub fn gaussian_vector(stream: &RngStream, dim: usize) -> Vec<f64> {
    debug_assert!(dim >= 1);
    let mut out = vec![0.0; dim];
    fill_gaussian(&mut stream.rng(), &mut out);
    out
}

pub fn fill_rademacher<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    // One 64-bit word yields 64 signs.
    for chunk in out.chunks_mut(64) {
        let word: u64 = rng.random();
        for (i, v) in chunk.iter_mut().enumerate() {
            *v = if (word >> i) & 1 == 1 { 1.0 } else { -1.0 };
        }
    }
}

/// `dim` independent ±1 signs.
pub fn rademacher_vector(stream: &RngStream, dim: usize) -> Vec<f64> {
    debug_assert!(dim >= 1);
    let mut out = vec![0.0; dim];
    fill_rademacher(&mut stream.rng(), &mut out);
    out
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability must lie in [0, 1], got {p}")))
    }
}

pub fn sample_bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Result<bool> {
    check_probability(p)?;
    // u is in [0, 1), so p = 0 never fires and p = 1 always does.
    Ok(rng.random::<f64>() < p)
}

/// One Bernoulli(`p`) draw from the start of `stream`.
pub fn bernoulli(stream: &RngStream, p: f64) -> Result<bool> {
    sample_bernoulli(&mut stream.rng(), p)
}

/// Draws `(Z_1 + sqrt(delta))^2 + Z_2^2 + ... + Z_d^2`.
///
/// All noncentrality sits on the first coordinate. The remaining `d - 1`
/// squared normals are drawn in one step as a central chi-square variate,
/// which has the same law and keeps the cost independent of `d`.
pub fn sample_noncentral_chi_square<R: Rng + ?Sized>(rng: &mut R, params: &ChiSquareParams) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let first = z + params.noncentrality.sqrt();
    let rest = if params.dof > 1 {
        ChiSquared::new((params.dof - 1) as f64)
            .expect("dof - 1 is positive")
            .sample(rng)
    } else {
        0.0
    };
    first * first + rest
}

pub fn noncentral_chi_square_sample(stream: &RngStream, params: &ChiSquareParams) -> f64 {
    sample_noncentral_chi_square(&mut stream.rng(), params)
}
