//! Moment statistics of sample sets.

use alloc::string::String;

use crate::error::{Error, Result};
use crate::mat::{mean, pairwise_map_sum};

/// Non-excess kurtosis `E[(x−μ)⁴]/σ⁴` (Gaussian baseline 3).
///
/// Requires ≥ 4 samples and nonzero variance.
pub fn kurtosis(samples: &[f64]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::DegenerateInput {
            detail: String::from("kurtosis needs at least 4 samples"),
        });
    }
    let n = samples.len() as f64;
    let mu = mean(samples);
    let m2 = pairwise_map_sum(samples, |x| {
        let d = x - mu;
        d * d
    }) / n;
    if m2 == 0.0 {
        return Err(Error::DegenerateInput {
            detail: String::from("kurtosis undefined for zero variance"),
        });
    }
    let m4 = pairwise_map_sum(samples, |x| {
        let d = x - mu;
        let d2 = d * d;
        d2 * d2
    }) / n;
    Ok(m4 / (m2 * m2))
}
