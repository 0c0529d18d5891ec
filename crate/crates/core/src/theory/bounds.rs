//! Closed-form detection rates and lower bounds, plus the constants of the
//! upper bound. Calculators take real-valued `n`, `m`, `d` so they can be
//! evaluated on smooth grids.

use crate::error::{Error, Result};
use crate::protocol::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub n: f64,
    pub m: f64,
    pub d: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl BoundInputs {
    pub fn new(n: f64, m: f64, d: f64, rho: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("n", n), ("m", m), ("d", d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("rho must be non-negative, got {rho}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(BoundInputs { n, m, d, rho, alpha })
    }

    /// Per-coordinate signal size `rho / sqrt(d)` of the Rademacher prior.
    pub fn epsilon(&self) -> f64 {
        self.rho / self.d.sqrt()
    }

    /// Noncentrality `(n/m) rho^2` of a local chi-square statistic.
    pub fn delta(&self) -> f64 {
        self.n * self.rho * self.rho / self.m
    }
}

/// `min{ sqrt(d m) / n, d / n }`, the squared detection rate up to constants.
pub fn detection_rate_sq(n: f64, m: f64, d: f64) -> f64 {
    ((d * m).sqrt() / n).min(d / n)
}

/// `rho_dist = sqrt(min{ sqrt(d m)/n, d/n })` with unit constants.
pub fn detection_threshold(inputs: &BoundInputs) -> f64 {
    detection_rate_sq(inputs.n, inputs.m, inputs.d).sqrt()
}

/// Squared signal size below which no distributed test has risk at most
/// alpha: `c_alpha * sqrt(d (m ∧ d)) / n`.
pub fn lower_bound_rho_sq(inputs: &BoundInputs) -> f64 {
    let c = c_alpha(inputs.alpha);
    c * (inputs.d * inputs.m.min(inputs.d)).sqrt() / inputs.n
}

/// Contraction coefficient of the public-coin strong data processing
/// inequality.
pub fn sdpi_beta(inputs: &BoundInputs) -> f64 {
    let BoundInputs { n, m, d, rho, .. } = *inputs;
    let snr = n * rho * rho;
    if m / snr < 0.5 {
        snr * snr / (d * m * m)
    } else {
        2.0 * snr / (d * m)
    }
}

/// Upper bound `48 beta m + 128 n rho^2 / d` on the information the
/// transcripts carry about the hypothesis.
pub fn information_bound(inputs: &BoundInputs) -> f64 {
    48.0 * sdpi_beta(inputs) * inputs.m + 128.0 * inputs.n * inputs.rho * inputs.rho / inputs.d
}

/// `max{0, 1 - 4 sqrt(6 (n rho^2 / d)(max{n rho^2 / m, 2} + 8/3))}`.
pub fn risk_lower_bound(inputs: &BoundInputs) -> f64 {
    let snr = inputs.n * inputs.rho * inputs.rho;
    let radicand = 6.0 * snr / inputs.d * ((snr / inputs.m).max(2.0) + 8.0 / 3.0);
    (1.0 - 4.0 * radicand.sqrt()).max(0.0)
}

pub fn c_alpha(alpha: f64) -> f64 {
    (1.0 - alpha).powi(2) / 384.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    pub c_alpha: f64,
    pub m_alpha: f64,
    pub big_c_alpha: f64,
    pub d_bar: u64,
}

pub const DEFAULT_D_BAR: u64 = 100;

/// Evaluates `c_alpha`, `M_alpha` and `C_alpha` for a given dimension
/// threshold `d_bar`.
pub fn theory_constants(alpha: f64, d_bar: u64) -> Result<TheoryConstants> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if d_bar == 0 {
        return Err(Error::Domain("d_bar must be at least 1".into()));
    }
    let t = Thresholds::for_level(alpha);
    let e2 = std::f64::consts::E.powi(2);
    let pi = std::f64::consts::PI;
    let kb = t.kappa_bar;
    let kt2 = t.kappa_tilde.powi(2);
    let k2 = 4.0 / alpha;

    let m_alpha = [
        (32.0 * 5.0 * kb).powi(2),
        d_bar as f64,
        36.0 * kt2,
        4.0 * e2 * pi * kt2 * alpha.sqrt(),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);

    let big_c_alpha = [
        16.0 * m_alpha * m_alpha * k2,
        2.0 * (1.0 + 2f64.sqrt()) * k2.sqrt() * m_alpha,
        80.0 * kb,
        4096.0 * e2 * kt2 * alpha.powf(-2.5),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);

    Ok(TheoryConstants {
        c_alpha: c_alpha(alpha),
        m_alpha,
        big_c_alpha,
        d_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(n: f64, m: f64, d: f64, rho: f64) -> BoundInputs {
        BoundInputs::new(n, m, d, rho, 0.05).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn derived_parameters() {
        let b = inputs(1e4, 50.0, 500.0, 0.3);
        assert!(close(b.epsilon() * 500f64.sqrt(), 0.3, 1e-12));
        assert!(close(b.delta(), 1e4 * 0.09 / 50.0, 1e-12));
    }

    #[test]
    fn detection_threshold_examples() {
        let rho = detection_threshold(&inputs(1e4, 50.0, 500.0, 0.0));
        // rho^2 = sqrt(25000)/1e4 = 0.0158114
        assert!((rho * rho - 0.015_811_388).abs() < 1e-8);
        assert!((rho - 0.125_743).abs() < 1e-5);
        let rho = detection_threshold(&inputs(1e4, 5000.0, 5.0, 0.0));
        assert!((rho * rho - 5e-4).abs() < 1e-15);
        assert!((rho - 0.022_360_7).abs() < 1e-6);
        // elbow: both branches equal d/n
        let b = inputs(1e4, 300.0, 300.0, 0.0);
        assert!(close(detection_threshold(&b).powi(2), 300.0 / 1e4, 1e-14));
    }

    #[test]
    fn beta_branches() {
        // m / (n rho^2) = 0.5 -> second branch
        assert!(close(sdpi_beta(&inputs(1e4, 50.0, 500.0, 0.1)), 0.008, 1e-12));
        // m / (n rho^2) = 0.005 -> first branch
        assert!(close(sdpi_beta(&inputs(1e4, 50.0, 500.0, 1.0)), 80.0, 1e-12));
    }

    #[test]
    fn beta_continuous_at_switch() {
        for (n, d, rho) in [(1e4, 500.0, 0.1), (3e4, 20.0, 0.7), (100.0, 3.0, 2.0)] {
            let m = n * rho * rho / 2.0;
            let at = sdpi_beta(&inputs(n, m, d, rho));
            let below = sdpi_beta(&inputs(n, m * (1.0 - 1e-9), d, rho));
            let first_branch = (n * rho * rho).powi(2) / (d * m * m);
            assert!(close(at, first_branch, 1e-12));
            assert!(close(below, at, 1e-8));
        }
    }

    #[test]
    fn risk_lower_bound_examples() {
        assert_eq!(risk_lower_bound(&inputs(1e4, 50.0, 500.0, 0.0)), 1.0);
        // n rho^2 = 0.25: 1 - 4 sqrt(6 * 5e-4 * (2 + 8/3))
        let v = risk_lower_bound(&inputs(1e4, 50.0, 500.0, 0.005));
        let expected = 1.0 - 4.0 * (6.0f64 * 5e-4 * (2.0 + 8.0 / 3.0)).sqrt();
        assert!(close(v, expected, 1e-12));
        assert!((v - 0.5267).abs() < 1e-4);
        // raw value 1 - 1.893 < 0
        assert_eq!(risk_lower_bound(&inputs(1e4, 50.0, 500.0, 0.02)), 0.0);
    }

    #[test]
    fn constants_at_five_percent() {
        let c = theory_constants(0.05, 100).unwrap();
        assert!((c.c_alpha - 0.002_350_26).abs() < 1e-8);
        let kb = Thresholds::for_level(0.05).kappa_bar;
        assert!(close(c.m_alpha, (160.0 * kb).powi(2), 1e-14));
        assert!((c.m_alpha - 3.365e5).abs() < 1e3);
        assert!(close(c.big_c_alpha, 16.0 * c.m_alpha.powi(2) * 80.0, 1e-14));
        // d_bar only matters once it dominates
        assert_eq!(theory_constants(0.05, 10_000_000).unwrap().m_alpha, 1e7);
        assert!(theory_constants(0.0, 100).is_err());
        assert!(theory_constants(0.5, 0).is_err());
    }

    #[test]
    fn c_alpha_decreasing() {
        let values: Vec<f64> = (1..=100).map(|i| c_alpha(i as f64 / 101.0)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn input_validation() {
        assert!(BoundInputs::new(0.0, 1.0, 1.0, 0.1, 0.05).is_err());
        assert!(BoundInputs::new(1.0, 1.0, 1.0, -0.1, 0.05).is_err());
        assert!(BoundInputs::new(1.0, 1.0, 1.0, 0.1, 1.0).is_err());
    }
}
