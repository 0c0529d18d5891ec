//! Random number streams and the chi-square distribution function.

pub mod rng;
pub mod special;

pub use rng::{
    bernoulli, gaussian_vector, noncentral_chi_square_sample, rademacher_vector, ChiSquareParams,
    Purpose, RngStream, StreamKey,
};
pub use special::{chi_square_cdf, regularized_gamma_p, ChiSquareCdf};
