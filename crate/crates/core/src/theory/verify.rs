//! Monte Carlo checks of the probabilistic inequalities behind the bounds.
//!
//! Every verifier takes a single [`RngStream`] and derives one substream per
//! replication, so the result does not depend on the rayon pool size.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::rng::{
    fill_gaussian, fill_rademacher, sample_noncentral_chi_square, ChiSquareParams, RngStream,
};

/// Allowed excess over a bound, in Monte Carlo standard errors.
pub const TOLERANCE_SE: f64 = 3.0;

fn std_err(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn count_parallel<F>(replications: u64, stream: &RngStream, hit: F) -> u64
where
    F: Fn(&mut crate::stats::rng::StreamRng) -> bool + Sync,
{
    (0..replications)
        .into_par_iter()
        .map(|r| u64::from(hit(&mut stream.substream(r).rng())))
        .sum()
}

fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln L(x)` with `L(x) = prod_i exp(-eps^2 / (2 sigma^2)) cosh(x_i eps / sigma^2)`.
pub fn log_likelihood_ratio(x: &[f64], epsilon: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let s2 = sigma * sigma;
    let shift = -0.5 * epsilon * epsilon / s2;
    Ok(x.iter().map(|&xi| shift + ln_cosh(xi * epsilon / s2)).sum())
}

/// Likelihood ratio of the Rademacher mixture `N(eps R, sigma^2 I)` against
/// `N(0, sigma^2 I)`.
pub fn likelihood_ratio(x: &[f64], epsilon: f64, sigma: f64) -> Result<f64> {
    Ok(log_likelihood_ratio(x, epsilon, sigma)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceCheck {
    pub d: u64,
    pub delta: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub bound: f64,
    pub replications: u64,
}

impl DominanceCheck {
    pub fn passed(&self) -> bool {
        self.empirical >= self.bound - TOLERANCE_SE * self.std_err
    }
}

/// `1/2 + (1/40) min(delta / sqrt(d), 1/2)`.
pub fn dominance_bound(d: u64, delta: f64) -> f64 {
    0.5 + (delta / (d as f64).sqrt()).min(0.5) / 40.0
}

/// Estimates `Pr(V >= U)` for independent `V ~ chi2_d(delta)`, `U ~ chi2_d`.
pub fn verify_chisq_dominance(
    d: u64,
    delta: f64,
    replications: u64,
    stream: &RngStream,
) -> Result<DominanceCheck> {
    let shifted = ChiSquareParams::new(d, delta)?;
    let central = ChiSquareParams::central(d)?;
    if replications == 0 {
        return Err(Error::Domain("replications must be at least 1".into()));
    }
    let hits = count_parallel(replications, stream, |rng| {
        let v = sample_noncentral_chi_square(rng, &shifted);
        let u = sample_noncentral_chi_square(rng, &central);
        v >= u
    });
    let empirical = hits as f64 / replications as f64;
    Ok(DominanceCheck {
        d,
        delta,
        empirical,
        std_err: std_err(empirical, replications),
        bound: dominance_bound(d, delta),
        replications,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffCheck {
    pub p: f64,
    pub k: u64,
    pub delta: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub bound: f64,
    pub replications: u64,
}

impl ChernoffCheck {
    /// The bound is at least one and says nothing.
    pub fn vacuous(&self) -> bool {
        self.bound >= 1.0
    }

    pub fn passed(&self) -> bool {
        self.vacuous() || self.empirical <= self.bound + TOLERANCE_SE * self.std_err
    }
}

/// Estimates `Pr(|sum_i (B_i - p)| >= delta k p)` for `k` i.i.d. `Ber(p)`
/// and compares it with `2 exp(-delta^2 k p / 3)`.
pub fn verify_chernoff(
    p: f64,
    k: u64,
    delta: f64,
    replications: u64,
    stream: &RngStream,
) -> Result<ChernoffCheck> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if k == 0 || replications == 0 {
        return Err(Error::Domain("k and replications must be positive".into()));
    }
    let binomial = Binomial::new(k, p).map_err(|e| Error::Domain(e.to_string()))?;
    let mean = k as f64 * p;
    let hits = count_parallel(replications, stream, |rng| {
        let sum = binomial.sample(rng) as f64;
        (sum - mean).abs() >= delta * mean
    });
    let empirical = hits as f64 / replications as f64;
    Ok(ChernoffCheck {
        p,
        k,
        delta,
        empirical,
        std_err: std_err(empirical, replications),
        bound: 2.0 * (-delta * delta * mean / 3.0).exp(),
        replications,
    })
}

/// Sub-Gaussian variance proxy of the likelihood ratios.
pub fn subgaussian_beta(d: u64, epsilon: f64, sigma: f64) -> f64 {
    let ratio = (sigma / epsilon).powi(2);
    if ratio < d as f64 / 2.0 {
        d as f64 * (epsilon / sigma).powi(4)
    } else {
        2.0 * (epsilon / sigma).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub s: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub bound: f64,
}

impl TailPoint {
    pub fn vacuous(&self) -> bool {
        self.bound >= 1.0
    }

    pub fn violated(&self) -> bool {
        !self.vacuous() && self.empirical > self.bound + TOLERANCE_SE * self.std_err
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubGaussianReport {
    pub d: u64,
    pub epsilon: f64,
    pub sigma: f64,
    pub beta: f64,
    pub replications: u64,
    pub points: Vec<TailPoint>,
}

impl SubGaussianReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| !p.violated())
    }

    pub fn violations(&self) -> impl Iterator<Item = &TailPoint> {
        self.points.iter().filter(|p| p.violated())
    }
}

/// Twenty equispaced points `s = i / 21`, `i = 1..=20`.
pub fn tail_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 21.0).collect()
}

/// Tail of `|L_v(X) - 1|` for `v ~ Ber(1/2)`, `X | v=0 ~ N(0, sigma^2 I_d)`
/// and `X | v=1 ~ N(eps R, sigma^2 I_d)`, against `12 exp(-s^2 / (2 beta))`.
///
/// With `L = dP_1/dP_0` both normalized ratios `2/(1+L)` and `2L/(1+L)` sit
/// at the same distance `|L - 1|/(L + 1)` from one, so one tail covers both.
pub fn verify_subgaussian_tail(
    d: u64,
    epsilon: f64,
    sigma: f64,
    replications: u64,
    stream: &RngStream,
) -> Result<SubGaussianReport> {
    if d == 0 || replications == 0 {
        return Err(Error::Domain("d and replications must be positive".into()));
    }
    if !(sigma > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::Domain("need sigma > 0 and epsilon >= 0".into()));
    }
    let grid = tail_grid();
    let beta = subgaussian_beta(d, epsilon, sigma);
    let dim = d as usize;

    let deviations: Vec<f64> = (0..replications)
        .into_par_iter()
        .map_init(
            || (vec![0.0; dim], vec![0.0; dim]),
            |(x, signs), r| -> Result<f64> {
                let mut rng = stream.substream(r).rng();
                let alternative: bool = rng.random();
                fill_gaussian(&mut rng, x);
                x.iter_mut().for_each(|v| *v *= sigma);
                if alternative {
                    fill_rademacher(&mut rng, signs);
                    x.iter_mut().zip(signs.iter()).for_each(|(v, s)| *v += epsilon * s);
                }
                let ln_l = log_likelihood_ratio(x, epsilon, sigma)?;
                // |L - 1| / (L + 1) = tanh(|ln L| / 2)
                Ok((0.5 * ln_l.abs()).tanh())
            },
        )
        .collect::<Result<_>>()?;

    let points = grid
        .iter()
        .map(|&s| {
            let hits = deviations.iter().filter(|&&dev| dev >= s).count();
            let empirical = hits as f64 / replications as f64;
            TailPoint {
                s,
                empirical,
                std_err: std_err(empirical, replications),
                bound: if beta > 0.0 {
                    12.0 * (-s * s / (2.0 * beta)).exp()
                } else {
                    0.0
                },
            }
        })
        .collect();

    Ok(SubGaussianReport {
        d,
        epsilon,
        sigma,
        beta,
        replications,
        points,
    })
}
