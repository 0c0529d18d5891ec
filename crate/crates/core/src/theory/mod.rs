//! Rate and bound calculators, and Monte Carlo verifiers for the inequalities
//! they rest on.

pub mod bounds;
pub mod verify;

pub use bounds::{
    c_alpha, detection_rate_sq, detection_threshold, information_bound, lower_bound_rho_sq,
    risk_lower_bound, sdpi_beta, theory_constants, BoundInputs, TheoryConstants, DEFAULT_D_BAR,
};
pub use verify::{
    likelihood_ratio, log_likelihood_ratio, subgaussian_beta, verify_chernoff,
    verify_chisq_dominance, verify_subgaussian_tail, ChernoffCheck, DominanceCheck,
    SubGaussianReport, TailPoint,
};
