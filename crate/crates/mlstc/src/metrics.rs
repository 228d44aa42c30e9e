//! Rate and distortion measurement: per-dimension MSE between vector sets
//! and the empirical entropy of coded symbol streams.

use crate::codec::TernaryCode;
use crate::error::{Error, Result};
use crate::math::VectorSet;

/// Average per-dimension squared error, `(1/(n M)) sum ||f_i - fhat_i||^2`.
pub fn measure_distortion(original: &VectorSet, reconstructed: &VectorSet) -> Result<f64> {
    if original.dim() != reconstructed.dim() || original.len() != reconstructed.len() {
        return Err(Error::ShapeMismatch(format!(
            "distortion over {}x{} vs {}x{}",
            original.dim(),
            original.len(),
            reconstructed.dim(),
            reconstructed.len()
        )));
    }
    if original.is_empty() {
        return Err(Error::ShapeMismatch("distortion over empty sets".into()));
    }
    let sum: f64 = original
        .as_slice()
        .iter()
        .zip(reconstructed.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / original.as_slice().len() as f64)
}

/// Empirical entropy in bits/dimension of one layer's codes: per-dimension
/// plug-in entropy of the observed {-1, 0, +1} frequencies, averaged over
/// all `dim` coordinates (never-coded coordinates contribute zero).
pub fn empirical_code_entropy(codes: &[TernaryCode], dim: usize) -> f64 {
    if codes.is_empty() || dim == 0 {
        return 0.0;
    }
    let mut plus = vec![0u64; dim];
    let mut minus = vec![0u64; dim];
    for code in codes {
        for &(idx, sign) in code.support() {
            if sign > 0 {
                plus[idx as usize] += 1;
            } else {
                minus[idx as usize] += 1;
            }
        }
    }
    let total = codes.len() as f64;
    let plogp = |p: f64| if p > 0.0 { p * p.log2() } else { 0.0 };
    let mut bits = 0.0;
    for i in 0..dim {
        let p_plus = plus[i] as f64 / total;
        let p_minus = minus[i] as f64 / total;
        let p_zero = 1.0 - p_plus - p_minus;
        bits -= plogp(p_plus) + plogp(p_minus) + plogp(p_zero.max(0.0));
    }
    bits / dim as f64
}
