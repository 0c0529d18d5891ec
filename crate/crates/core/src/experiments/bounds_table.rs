//! Tabulated detection rates and risk lower bounds over instance grids.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theory::bounds::{detection_threshold, lower_bound_rho_sq, risk_lower_bound, BoundInputs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceShape {
    pub n: u64,
    pub m: u64,
    pub d: u64,
}

/// One `(instance, rho)` pair. `rho = factor * rho_dist`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: u64,
    pub m: u64,
    pub d: u64,
    pub alpha: f64,
    pub rho_dist: f64,
    /// `sqrt(c_alpha sqrt(d (m ∧ d)) / n)`.
    pub rho_lower: f64,
    pub factor: f64,
    pub rho: f64,
    pub risk_lower_bound: f64,
}

pub fn bounds_rows(grid: &[InstanceShape], alpha: f64, factors: &[f64]) -> Result<Vec<BoundsRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec("bounds grid is empty".into()));
    }
    if factors.is_empty() || factors.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return Err(Error::InvalidSpec("rho factors must be finite and non-negative".into()));
    }
    let mut rows = Vec::with_capacity(grid.len() * factors.len());
    for s in grid {
        let base = BoundInputs::new(s.n as f64, s.m as f64, s.d as f64, 0.0, alpha)?;
        let rho_dist = detection_threshold(&base);
        let rho_lower = lower_bound_rho_sq(&base).sqrt();
        for &factor in factors {
            let rho = factor * rho_dist;
            rows.push(BoundsRow {
                n: s.n,
                m: s.m,
                d: s.d,
                alpha,
                rho_dist,
                rho_lower,
                factor,
                rho,
                risk_lower_bound: risk_lower_bound(&BoundInputs { rho, ..base }),
            });
        }
    }
    Ok(rows)
}

/// Writes [`bounds_rows`] as CSV with LF line endings.
pub fn emit_bounds_table(
    grid: &[InstanceShape],
    alpha: f64,
    factors: &[f64],
    path: &Path,
) -> Result<Vec<BoundsRow>> {
    let rows = bounds_rows(grid, alpha, factors)?;
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    for row in &rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(rows)
}
