//! Helpers shared by the integration tests: an independent chi-square
//! oracle and goodness-of-fit statistics.
#![allow(dead_code)]

use libm::erfc;
use statrs::function::gamma::ln_gamma;

/// 0.1% critical value of chi-square with one degree of freedom.
pub const CHI2_1_999: f64 = 10.827_566_170_662_733;

/// Asymptotic 0.1% critical value of `sqrt(N) D_N`.
pub const KS_999: f64 = 1.949_5;

/// `ln sum exp(terms)`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Even `d`: `F = 1 - exp(-x/2) sum_{k < d/2} (x/2)^k / k!`.
/// Odd `d`: `F = erf(sqrt(x/2)) - sum_{k=1}^{(d-1)/2} exp(-x/2) (x/2)^{k-1/2} / Gamma(k+1/2)`.
pub fn oracle_cdf(x: f64, d: u64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let h = x / 2.0;
    let (terms, head): (Vec<f64>, f64) = if d.is_multiple_of(2) {
        let terms = (0..d / 2)
            .map(|k| -h + k as f64 * h.ln() - ln_gamma(k as f64 + 1.0))
            .collect();
        (terms, 1.0)
    } else {
        let terms = (1..=(d - 1) / 2)
            .map(|k| -h + (k as f64 - 0.5) * h.ln() - ln_gamma(k as f64 + 0.5))
            .collect();
        (terms, 1.0 - erfc(h.sqrt()))
    };
    if terms.is_empty() {
        return head;
    }
    // Subtracting the upper tail loses nothing where F is small, and where F
    // is near one the sum is tiny, so absolute error stays near 1e-15.
    (head - log_sum_exp(&terms).exp()).clamp(0.0, 1.0)
}

/// `10^4` points covering the bulk and right tail of `chi2_d`.
pub fn cdf_grid(d: u64) -> Vec<f64> {
    let d = d as f64;
    let hi = d + 12.0 * (2.0 * d).sqrt() + 10.0;
    (0..10_000).map(|i| hi * i as f64 / 9_999.0).collect()
}

/// Kolmogorov-Smirnov distance of `u` from the uniform law.
pub fn ks_uniform(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).max((i + 1) as f64 / n - v))
        .fold(0.0, f64::max)
}

/// Pearson statistic of `ones` out of `total` against a fair coin.
pub fn pearson_fair(ones: u64, total: u64) -> f64 {
    let e = total as f64 / 2.0;
    2.0 * (ones as f64 - e).powi(2) / e
}
