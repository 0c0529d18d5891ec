//! The standard battery of Monte Carlo checks behind the theory module.

use std::fmt;

use crate::error::Result;
use crate::stats::rng::{Purpose, RngStream, StreamKey};
use crate::theory::verify::{verify_chernoff, verify_chisq_dominance, verify_subgaussian_tail};

/// Outcome of one verifier configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub verifier: &'static str,
    pub params: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{status} {:<12} {:<32} {}", self.verifier, self.params, self.detail)
    }
}

fn stream(seed: u64, family: u64, index: u64) -> RngStream {
    let key = StreamKey::new(Purpose::Verifier).experiment(family).grid_index(index);
    RngStream::from_key(seed, &key)
}

/// `d in {100, 400, 1000}`, `delta in {1, sqrt(d)/4, sqrt(d)/2, 10 sqrt(d)}`.
pub fn dominance_battery(replications: u64, seed: u64) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for d in [100u64, 400, 1000] {
        let r = (d as f64).sqrt();
        for delta in [1.0, r / 4.0, r / 2.0, 10.0 * r] {
            let c = verify_chisq_dominance(d, delta, replications, &stream(seed, 1, out.len() as u64))?;
            out.push(CheckLine {
                verifier: "dominance",
                params: format!("d={d} delta={delta:.4}"),
                passed: c.passed(),
                detail: format!("P(V>=U)={:.5} bound={:.5} se={:.1e}", c.empirical, c.bound, c.std_err),
            });
        }
    }
    Ok(out)
}

/// `k in {10, 100, 1000}`, `p in {0.1, 0.5}`, `delta in {0.1, 0.3, 0.9}`.
pub fn chernoff_battery(replications: u64, seed: u64) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for k in [10u64, 100, 1000] {
        for p in [0.1, 0.5] {
            for delta in [0.1, 0.3, 0.9] {
                let c = verify_chernoff(p, k, delta, replications, &stream(seed, 2, out.len() as u64))?;
                let note = if c.vacuous() { " (vacuous)" } else { "" };
                out.push(CheckLine {
                    verifier: "chernoff",
                    params: format!("k={k} p={p} delta={delta}"),
                    passed: c.passed(),
                    detail: format!("tail={:.5} bound={:.5}{note}", c.empirical, c.bound),
                });
            }
        }
    }
    Ok(out)
}

/// `(d, eps, sigma) in {(100, 0.05, 1), (500, 0.0447, 1), (20, 0.3, 1)}`.
pub fn subgaussian_battery(replications: u64, seed: u64) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for (d, eps, sigma) in [(100u64, 0.05, 1.0), (500, 0.0447, 1.0), (20, 0.3, 1.0)] {
        let rep = verify_subgaussian_tail(d, eps, sigma, replications, &stream(seed, 3, out.len() as u64))?;
        let worst = rep
            .points
            .iter()
            .filter(|p| !p.vacuous())
            .map(|p| p.empirical - p.bound)
            .fold(f64::NEG_INFINITY, f64::max);
        let informative = rep.points.iter().filter(|p| !p.vacuous()).count();
        out.push(CheckLine {
            verifier: "subgaussian",
            params: format!("d={d} eps={eps} sigma={sigma}"),
            passed: rep.passed(),
            detail: format!(
                "beta={:.3e} informative={informative}/20 max(emp-bound)={worst:.3e}",
                rep.beta
            ),
        });
    }
    Ok(out)
}

pub fn standard_battery(replications: u64, seed: u64) -> Result<Vec<CheckLine>> {
    let mut lines = dominance_battery(replications, seed)?;
    lines.extend(chernoff_battery(replications, seed)?);
    lines.extend(subgaussian_battery(replications, seed)?);
    Ok(lines)
}
