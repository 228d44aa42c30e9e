//! Theoretical reference curves for a Gaussian vector with a known
//! eigenvalue spectrum: reverse water-filling rate allocation and the
//! Shannon Lower Bound traced over a rate grid.

use crate::error::{Error, Result};
use crate::quantizer;

/// Reverse water-filling solution over a spectrum of per-dimension
/// variances.
///
/// `water_level` is the common distortion poured into every dimension whose
/// variance exceeds it (distortion units, distinct from the quantizer
/// threshold); dimensions below the level are reproduced by zero.
#[derive(Debug, Clone)]
pub struct WaterfillSolution {
    pub water_level: f64,
    pub per_dim_distortion: Vec<f64>,
    /// Bits allocated per dimension, `max(0, 0.5 log2(sigma^2 / D))`.
    pub per_dim_rate: Vec<f64>,
    /// Bits per dimension averaged over the whole vector.
    pub total_rate: f64,
    /// Per-dimension MSE averaged over the whole vector.
    pub total_distortion: f64,
}

/// A point on the Shannon Lower Bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlbPoint {
    pub rate: f64,
    pub distortion: f64,
}

/// Optimal rate allocation at a per-dimension distortion target.
///
/// Finds the water level `w` with `mean(min(w, sigma_i^2)) = target` by
/// bisection to 1e-12 relative accuracy, then reads off
/// `D_i = min(w, sigma_i^2)` and `R_i = 0.5 log2(sigma_i^2 / D_i)`.
/// Targets at or above the mean variance return the zero-rate solution.
pub fn waterfill(spectrum_sq: &[f64], target_distortion: f64) -> Result<WaterfillSolution> {
    if !(target_distortion > 0.0) {
        return Err(Error::Domain(format!(
            "waterfill needs a positive distortion target, got {target_distortion}"
        )));
    }
    if spectrum_sq.is_empty() {
        return Err(Error::Domain("waterfill needs a non-empty spectrum".into()));
    }
    let n = spectrum_sq.len() as f64;
    let mean_var = spectrum_sq.iter().sum::<f64>() / n;
    if target_distortion >= mean_var {
        // Trivial bound: describe nothing, keep every variance.
        return Ok(solution_at(spectrum_sq, f64::INFINITY));
    }

    let max_var = spectrum_sq.iter().fold(0.0f64, |m, &v| m.max(v));
    let (mut lo, mut hi) = (0.0f64, max_var);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = spectrum_sq.iter().map(|&s| s.min(mid)).sum::<f64>() / n;
        if d < target_distortion {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(solution_at(spectrum_sq, 0.5 * (lo + hi)))
}

fn solution_at(spectrum_sq: &[f64], water_level: f64) -> WaterfillSolution {
    let n = spectrum_sq.len() as f64;
    let per_dim_distortion: Vec<f64> =
        spectrum_sq.iter().map(|&s| s.min(water_level)).collect();
    let per_dim_rate: Vec<f64> = spectrum_sq
        .iter()
        .zip(&per_dim_distortion)
        .map(|(&s, &d)| {
            // Zero eigenvalues carry no rate; the log is undefined there.
            if s <= water_level || d <= 0.0 {
                0.0
            } else {
                0.5 * (s / d).log2()
            }
        })
        .collect();
    let total_rate = per_dim_rate.iter().sum::<f64>() / n;
    let total_distortion = per_dim_distortion.iter().sum::<f64>() / n;
    WaterfillSolution {
        water_level: if water_level.is_finite() {
            water_level
        } else {
            spectrum_sq.iter().fold(0.0f64, |m, &v| m.max(v))
        },
        per_dim_distortion,
        per_dim_rate,
        total_rate,
        total_distortion,
    }
}

/// Distortion of the optimal allocation at each requested rate
/// (bits/dimension), obtained by inverting [`waterfill`] with bisection on
/// the distortion target.
pub fn slb_curve(spectrum_sq: &[f64], rate_grid: &[f64]) -> Result<Vec<SlbPoint>> {
    if rate_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain("slb rates must be positive".into()));
    }
    let n = spectrum_sq.len() as f64;
    let mean_var = spectrum_sq.iter().sum::<f64>() / n;
    if mean_var <= 0.0 {
        return Err(Error::Domain("slb needs a positive spectrum".into()));
    }

    // Rate of the water-filling solution at water level `w`, which is
    // strictly decreasing in `w`; invert it, then read the distortion off
    // the level.
    let rate_at = |w: f64| -> f64 {
        spectrum_sq
            .iter()
            .map(|&s| if s > w { 0.5 * (s / w).log2() } else { 0.0 })
            .sum::<f64>()
            / n
    };
    let max_var = spectrum_sq.iter().fold(0.0f64, |m, &v| m.max(v));

    let mut points = Vec::with_capacity(rate_grid.len());
    for &rate in rate_grid {
        let mut hi = max_var;
        let mut lo = max_var * 0.5f64.powf(2.0 * rate * n);
        while rate_at(lo) < rate {
            lo *= 0.5;
            if lo < f64::MIN_POSITIVE {
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate_at(mid) > rate {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let level = 0.5 * (lo + hi);
        let distortion = spectrum_sq.iter().map(|&s| s.min(level)).sum::<f64>() / n;
        points.push(SlbPoint { rate, distortion });
    }
    Ok(points)
}

/// Per-dimension `(rate, distortion)` of the single-layer ternary quantizer
/// at a shared threshold and the optimal magnitudes, for side-by-side
/// comparison against [`waterfill`].
pub fn single_layer_allocation(spectrum_sq: &[f64], lambda: f64) -> Result<Vec<(f64, f64)>> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!(
            "allocation needs lambda >= 0, got {lambda}"
        )));
    }
    Ok(spectrum_sq
        .iter()
        .map(|&s2| {
            let sigma = s2.sqrt();
            let beta = quantizer::optimal_beta(sigma, lambda);
            (
                quantizer::rate_per_dim(sigma, lambda),
                quantizer::distortion_per_dim(sigma, lambda, beta),
            )
        })
        .collect())
}
