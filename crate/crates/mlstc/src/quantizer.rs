//! Scalar ternary quantization: the thresholding operator, the optimal
//! per-dimension reconstruction magnitude, and the analytic distortion and
//! rate of a thresholded Gaussian coordinate.
//!
//! A coordinate with standard deviation `sigma`, threshold `lambda`, and
//! magnitude `beta` is quantized to `{-beta, 0, +beta}`; the tail activation
//! probability is `alpha = Q(lambda / sigma)` and the expected squared error
//! is
//!
//! ```text
//! D = sigma^2 + 2 beta^2 Q(lambda/sigma)
//!     - (4 beta sigma / sqrt(2 pi)) exp(-lambda^2 / (2 sigma^2))
//! ```

use crate::error::{Error, Result};
use crate::math::{ht, q};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
/// Grid resolution for the beta search.
const BETA_GRID: usize = 4096;
/// Tails rarer than this are numerically dead: the distortion surface in
/// beta is flat to within f64 rounding against `sigma^2` (the grid can no
/// longer resolve its minimum), and the rate contribution is below 1e-7
/// bits. Such coordinates are left uncoded.
const ALPHA_FLOOR: f64 = 1e-9;
/// Maximum entropy of a ternary symbol, `log2(3)`.
pub const MAX_TERNARY_RATE: f64 = 1.584_962_500_721_156_2;

/// Element-wise ternary thresholding: `sign(v_i)` where `|v_i| > lambda`,
/// else 0.
pub fn ternarize(v: &[f64], lambda: f64) -> Result<Vec<i8>> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!(
            "ternarize needs lambda >= 0, got {lambda}"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("ternarize needs finite inputs".into()));
    }
    Ok(v.iter().map(|&x| ternary_symbol(x, lambda)).collect())
}

#[inline]
pub(crate) fn ternary_symbol(x: f64, lambda: f64) -> i8 {
    if x > lambda {
        1
    } else if x < -lambda {
        -1
    } else {
        0
    }
}

/// One quantized dimension: projected std-dev, shared threshold, magnitude,
/// and tail activation probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerDim {
    pub sigma: f64,
    pub lambda: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl QuantizerDim {
    /// Dimension with the distortion-optimal magnitude for `(sigma, lambda)`.
    pub fn optimal(sigma: f64, lambda: f64) -> Self {
        QuantizerDim {
            sigma,
            lambda,
            beta: optimal_beta(sigma, lambda),
            alpha: activation(sigma, lambda),
        }
    }

    /// Dimension with an explicit (possibly suboptimal) magnitude.
    pub fn with_beta(sigma: f64, lambda: f64, beta: f64) -> Self {
        QuantizerDim {
            sigma,
            lambda,
            beta,
            alpha: activation(sigma, lambda),
        }
    }

    /// Expected squared error of this dimension.
    pub fn distortion(&self) -> f64 {
        distortion_per_dim(self.sigma, self.lambda, self.beta)
    }

    /// Entropy in bits of this dimension's ternary symbol.
    pub fn rate(&self) -> f64 {
        ht(self.alpha)
    }
}

/// `alpha = Q(lambda / sigma)`, defined as 0 for a dead coordinate.
#[inline]
pub fn activation(sigma: f64, lambda: f64) -> f64 {
    if sigma > 0.0 {
        q(lambda / sigma)
    } else {
        0.0
    }
}

/// Expected squared error of one thresholded Gaussian coordinate.
pub fn distortion_per_dim(sigma: f64, lambda: f64, beta: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let t = lambda / sigma;
    sigma * sigma + 2.0 * beta * beta * q(t) - (4.0 * beta * sigma / SQRT_2PI) * (-0.5 * t * t).exp()
}

/// Entropy in bits of the ternary symbol at `(sigma, lambda)`.
pub fn rate_per_dim(sigma: f64, lambda: f64) -> f64 {
    ht(activation(sigma, lambda))
}

/// Magnitude minimizing the per-dimension distortion.
///
/// A grid search over `beta in [0, lambda + 6 sigma]` locates the minimum;
/// one closed-form polish step `beta* = sigma exp(-lambda^2 / 2 sigma^2) /
/// (sqrt(2 pi) Q(lambda/sigma))` (the stationary point of the distortion in
/// `beta`) refines it. The two always agree within one grid step.
pub fn optimal_beta(sigma: f64, lambda: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let alpha = activation(sigma, lambda);
    let t = lambda / sigma;
    let gauss = (-0.5 * t * t).exp();
    if alpha < ALPHA_FLOOR || gauss == 0.0 {
        return 0.0;
    }

    let hi = lambda + 6.0 * sigma;
    let step = hi / (BETA_GRID - 1) as f64;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..BETA_GRID {
        let beta = j as f64 * step;
        let d = distortion_per_dim(sigma, lambda, beta);
        if d < best.0 {
            best = (d, beta);
        }
    }

    let refined = sigma * gauss / (SQRT_2PI * alpha);
    if refined.is_finite() && distortion_per_dim(sigma, lambda, refined) <= best.0 {
        refined
    } else {
        best.1
    }
}

/// Grid-only argmin of the distortion in `beta` (the polish-free search);
/// exposed for consistency checks against the closed-form refinement.
pub fn grid_beta(sigma: f64, lambda: f64) -> f64 {
    if sigma <= 0.0 || activation(sigma, lambda) < ALPHA_FLOOR {
        return 0.0;
    }
    let hi = lambda + 6.0 * sigma;
    let step = hi / (BETA_GRID - 1) as f64;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..BETA_GRID {
        let beta = j as f64 * step;
        let d = distortion_per_dim(sigma, lambda, beta);
        if d < best.0 {
            best = (d, beta);
        }
    }
    best.1
}

/// One grid step of the beta search domain for `(sigma, lambda)`.
pub fn beta_grid_step(sigma: f64, lambda: f64) -> f64 {
    (lambda + 6.0 * sigma) / (BETA_GRID - 1) as f64
}

/// Mean ternary rate in bits/dimension of a spectrum at a shared threshold.
pub fn mean_rate(spectrum_sq: &[f64], lambda: f64) -> f64 {
    if spectrum_sq.is_empty() {
        return 0.0;
    }
    let sum: f64 = spectrum_sq
        .iter()
        .map(|&s2| rate_per_dim(s2.sqrt(), lambda))
        .sum();
    sum / spectrum_sq.len() as f64
}

/// Finds the shared threshold whose mean ternary rate over the spectrum
/// equals `target_rate` (bits/dimension) within 1e-6 bits.
///
/// The mean rate over `lambda` rises from its binary value at `lambda = 0`
/// to a peak and then decays to zero, so two thresholds can share a rate.
/// This returns:
/// - `lambda = 0` when the target matches the binary-case rate exactly
///   (the marked `R = 1` operating point), and otherwise
/// - the *sparse-branch* solution (the largest threshold attaining the
///   target), matching how the codes are operated in practice.
pub fn lambda_for_rate(spectrum_sq: &[f64], target_rate: f64) -> Result<f64> {
    const RATE_TOL: f64 = 1e-6;
    if !(target_rate > 0.0 && target_rate <= MAX_TERNARY_RATE + 1e-12) {
        return Err(Error::Domain(format!(
            "target rate must lie in (0, log2(3)], got {target_rate}"
        )));
    }
    let max_sq = spectrum_sq.iter().fold(0.0f64, |m, &v| m.max(v));
    if max_sq <= 0.0 {
        return Err(Error::InfeasibleRate(
            "spectrum has no positive variance".into(),
        ));
    }
    let sigma_max = max_sq.sqrt();

    if (mean_rate(spectrum_sq, 0.0) - target_rate).abs() <= RATE_TOL {
        return Ok(0.0);
    }

    // Every per-dimension rate peaks at lambda = Qinv(1/3) * sigma_i, so the
    // mean is strictly decreasing beyond lambda_peak = Qinv(1/3) * sigma_max.
    let lambda_peak = q_inv_third() * sigma_max;
    let hi = 12.0 * sigma_max;

    let rate_at_peak = mean_rate(spectrum_sq, lambda_peak);
    if target_rate <= rate_at_peak + 1e-9 {
        return Ok(bisect_rate(spectrum_sq, target_rate, lambda_peak, hi));
    }

    // Target sits above the decreasing branch: scan the bump region
    // [0, lambda_peak] and bisect the right-most crossing if one exists.
    const SCAN: usize = 4096;
    let step = lambda_peak / SCAN as f64;
    let mut best_rate = f64::NEG_INFINITY;
    let mut crossing = None;
    for j in 0..=SCAN {
        let r = mean_rate(spectrum_sq, j as f64 * step);
        best_rate = best_rate.max(r);
        if r >= target_rate {
            crossing = Some(j);
        }
    }
    match crossing {
        Some(j) => {
            let lo = j as f64 * step;
            let hi = (j + 1) as f64 * step;
            Ok(bisect_rate(spectrum_sq, target_rate, lo, hi.min(lambda_peak)))
        }
        None => Err(Error::InfeasibleRate(format!(
            "no shared threshold reaches {target_rate} bits/dim (max attainable ~{best_rate:.6})"
        ))),
    }
}

/// Bisection on a bracket where the mean rate decreases through `target`.
fn bisect_rate(spectrum_sq: &[f64], target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_rate(spectrum_sq, mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `Qinv(1/3)`, located once by bisection (Q is strictly decreasing).
fn q_inv_third() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 1.0 / 3.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
    const ONE_MINUS_2_OVER_PI: f64 = 0.363_380_227_632_418_66;

    #[test]
    fn ternarize_examples() {
        assert_eq!(ternarize(&[0.5, -2.0, 3.0], 1.0).unwrap(), vec![0, -1, 1]);
        assert_eq!(ternarize(&[2.0, -0.1, 0.0], 0.0).unwrap(), vec![1, -1, 0]);
        // Strict inequality at the boundary.
        assert_eq!(ternarize(&[1.0], 1.0).unwrap(), vec![0]);
        assert!(ternarize(&[1.0], -0.5).is_err());
        assert!(ternarize(&[f64::NAN], 1.0).is_err());
    }

    #[test]
    fn distortion_examples() {
        // Threshold so large the code is always zero.
        assert_abs_diff_eq!(distortion_per_dim(1.0, 40.0, 1.0), 1.0, epsilon = 1e-10);
        // Binary case with the optimal magnitude: 1 - 2/pi.
        assert_abs_diff_eq!(
            distortion_per_dim(1.0, 0.0, SQRT_2_OVER_PI),
            ONE_MINUS_2_OVER_PI,
            epsilon = 1e-12
        );
        // Reconstructing by zero keeps the full variance.
        assert_abs_diff_eq!(distortion_per_dim(1.0, 0.0, 0.0), 1.0, epsilon = 1e-15);
        // Dead coordinate.
        assert_eq!(distortion_per_dim(0.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn optimal_beta_examples() {
        assert_abs_diff_eq!(optimal_beta(1.0, 0.0), SQRT_2_OVER_PI, epsilon = 1e-6);
        assert_eq!(optimal_beta(0.0, 3.0), 0.0);
        // The stationary point scales linearly in sigma.
        assert_abs_diff_eq!(optimal_beta(2.0, 0.0), 2.0 * SQRT_2_OVER_PI, epsilon = 1e-6);
        // Tail underflow: dead in practice.
        assert_eq!(optimal_beta(1.0, 60.0), 0.0);
    }

    #[test]
    fn optimal_beta_is_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let sigma = rng.random_range(0.05..4.0);
            let lambda = rng.random_range(0.0..5.0);
            let star = optimal_beta(sigma, lambda);
            let d_star = distortion_per_dim(sigma, lambda, star);
            for _ in 0..100 {
                let beta = rng.random_range(0.0..(lambda + 8.0 * sigma));
                assert!(
                    d_star <= distortion_per_dim(sigma, lambda, beta) + 1e-12,
                    "beta* not optimal at sigma={sigma}, lambda={lambda}"
                );
            }
            // Never worse than coding by zero.
            assert!(d_star <= sigma * sigma + 1e-12);
        }
    }

    #[test]
    fn grid_and_refinement_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let sigma = rng.random_range(0.05..4.0);
            let lambda = rng.random_range(0.0..5.0);
            let g = grid_beta(sigma, lambda);
            let r = optimal_beta(sigma, lambda);
            let step = beta_grid_step(sigma, lambda);
            assert!(
                (g - r).abs() <= step,
                "grid {g} vs refined {r} further than one step {step}"
            );
        }
    }

    #[test]
    fn rate_examples() {
        assert_abs_diff_eq!(rate_per_dim(1.0, 0.0), 1.0, epsilon = 1e-15);
        assert_eq!(rate_per_dim(0.0, 1.0), 0.0);
        // alpha = 1/4 carries 1.5 bits.
        let lambda = 0.674_489_750_196_081_7;
        assert_abs_diff_eq!(rate_per_dim(1.0, lambda), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn rate_monotone_in_lambda_past_peak() {
        // Non-increasing on the sparse branch for fixed sigma.
        let mut last = f64::INFINITY;
        let mut lambda = 0.44;
        while lambda < 8.0 {
            let r = rate_per_dim(1.0, lambda);
            assert!(r <= last + 1e-12);
            last = r;
            lambda += 0.01;
        }
    }

    #[test]
    fn lambda_for_rate_binary_case() {
        let spectrum = vec![1.0; 16];
        assert_eq!(lambda_for_rate(&spectrum, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn lambda_for_rate_sparse_branch() {
        // Equal sigmas, 1.5 bits: the sparse solution has alpha = 1/4.
        let spectrum = vec![4.0; 8];
        let lambda = lambda_for_rate(&spectrum, 1.5).unwrap();
        assert_abs_diff_eq!(activation(2.0, lambda), 0.25, epsilon = 1e-6);
        let achieved = mean_rate(&spectrum, lambda);
        assert_abs_diff_eq!(achieved, 1.5, epsilon = 1e-6);
    }

    #[test]
    fn lambda_for_rate_peak_rate() {
        // Equal sigmas can reach log2(3) exactly, at alpha = 1/3.
        let spectrum = vec![1.0; 4];
        let lambda = lambda_for_rate(&spectrum, MAX_TERNARY_RATE).unwrap();
        assert_abs_diff_eq!(activation(1.0, lambda), 1.0 / 3.0, epsilon = 1e-4);
    }

    #[test]
    fn lambda_for_rate_infeasible_heterogeneous() {
        // A single threshold cannot make unequal dimensions equiprobable.
        let spectrum = vec![4.0, 1.0, 0.25];
        assert!(matches!(
            lambda_for_rate(&spectrum, MAX_TERNARY_RATE),
            Err(Error::InfeasibleRate(_))
        ));
    }

    #[test]
    fn lambda_for_rate_low_rates() {
        let spectrum = vec![4.0, 2.0, 1.0, 0.5];
        for target in [0.05, 0.25, 0.5, 0.9] {
            let lambda = lambda_for_rate(&spectrum, target).unwrap();
            assert_abs_diff_eq!(mean_rate(&spectrum, lambda), target, epsilon = 1e-6);
        }
    }

    #[test]
    fn monte_carlo_matches_analytic_distortion() {
        // Empirical MSE of beta* . phi_lambda(X) against X over seeded draws
        // tracks the analytic expression within 1% relative.
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_101);
        let n = 1_000_000usize;
        let samples: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for &lambda in &[0.0, 0.5, 1.0, 2.0] {
            let beta = optimal_beta(1.0, lambda);
            let analytic = distortion_per_dim(1.0, lambda, beta);
            let mse: f64 = samples
                .iter()
                .map(|&x| {
                    let xh = beta * f64::from(ternary_symbol(x, lambda));
                    (x - xh) * (x - xh)
                })
                .sum::<f64>()
                / n as f64;
            let rel = (mse - analytic).abs() / analytic;
            assert!(rel < 0.01, "lambda={lambda}: mc {mse} vs analytic {analytic}");
        }
    }
}
