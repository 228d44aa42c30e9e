//! Scalar special functions: the Gaussian Q-function and ternary entropy.

use crate::error::{Error, Result};

/// `1/sqrt(pi)`.
const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Upper tail of the standard normal, `P[Z > x]`.
///
/// Computed as `erfc(x / sqrt(2)) / 2` with a Cody-style rational Chebyshev
/// approximation of `erfc`; absolute error is far below 1e-12 everywhere.
/// Underflows cleanly to 0 for large `x` (no NaN, no overflow).
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("q_function needs finite input, got {x}")));
    }
    Ok(q(x))
}

/// Unchecked Q-function for internal hot paths; input must be finite.
#[inline]
pub(crate) fn q(x: f64) -> f64 {
    debug_assert!(x.is_finite());
    0.5 * erfc(x / SQRT_2)
}

/// Complementary error function, rational Chebyshev approximation after
/// W. J. Cody (Math. Comp. 23, 1969; the classic three-interval scheme).
pub fn erfc(x: f64) -> f64 {
    // Coefficients for |x| <= 0.46875 (erf).
    const A: [f64; 5] = [
        3.161_123_743_870_565_6e0,
        1.138_641_541_510_501_56e2,
        3.774_852_376_853_020_2e2,
        3.209_377_589_138_469_47e3,
        1.857_777_061_846_031_53e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_09e1,
        2.440_246_379_344_441_73e2,
        1.282_616_526_077_372_28e3,
        2.844_236_833_439_170_62e3,
    ];
    // Coefficients for 0.46875 < |x| <= 4.
    const C: [f64; 9] = [
        5.641_884_969_886_700_9e-1,
        8.883_149_794_388_375_94e0,
        6.611_919_063_714_162_95e1,
        2.986_351_381_974_001_31e2,
        8.819_522_212_417_690_9e2,
        1.712_047_612_634_070_58e3,
        2.051_078_377_826_071_47e3,
        1.230_339_354_797_997_25e3,
        2.153_115_354_744_038_46e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_47e1,
        1.176_939_508_913_124_99e2,
        5.371_811_018_620_098_58e2,
        1.621_389_574_566_690_19e3,
        3.290_799_235_733_459_63e3,
        4.362_619_090_143_247_16e3,
        3.439_367_674_143_721_64e3,
        1.230_339_354_803_749_42e3,
    ];
    // Coefficients for |x| > 4.
    const P: [f64; 6] = [
        3.053_266_349_612_323_44e-1,
        3.603_448_999_498_044_39e-1,
        1.257_817_261_112_292_46e-1,
        1.608_378_514_874_227_66e-2,
        6.587_491_615_298_378_03e-4,
        1.631_538_713_730_209_78e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_42e0,
        1.872_952_849_923_460_47e0,
        5.279_051_029_514_284_12e-1,
        6.051_834_131_244_131_91e-2,
        2.335_204_976_268_691_85e-3,
    ];
    const THRESH: f64 = 0.46875;
    // erfc underflows below f64's normal range past this point.
    const XBIG: f64 = 26.543;

    let y = x.abs();
    let result = if y <= THRESH {
        // erfc = 1 - erf via the erf approximation.
        let ysq = y * y;
        let mut xnum = A[4] * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + A[i]) * ysq;
            xden = (xden + B[i]) * ysq;
        }
        return 1.0 - x * (xnum + A[3]) / (xden + B[3]);
    } else if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        let r = (xnum + C[7]) / (xden + D[7]);
        scaled_exp(y) * r
    } else if y < XBIG {
        let ysq = 1.0 / (y * y);
        let mut xnum = P[5] * ysq;
        let mut xden = ysq;
        for i in 0..4 {
            xnum = (xnum + P[i]) * ysq;
            xden = (xden + Q[i]) * ysq;
        }
        let r = ysq * (xnum + P[4]) / (xden + Q[4]);
        scaled_exp(y) * ((FRAC_1_SQRT_PI - r) / y)
    } else {
        0.0
    };

    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// `exp(-y^2)` evaluated with the split-argument trick for accuracy.
#[inline]
fn scaled_exp(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Entropy in bits of a ternary symbol with `P[+1] = P[-1] = alpha`.
///
/// `H_t(alpha) = -(2a log2 a + (1 - 2a) log2 (1 - 2a))`, with `0 log 0 = 0`.
pub fn ternary_entropy(alpha: f64) -> Result<f64> {
    // Tolerate float noise just outside the closed interval.
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=0.5 + SLACK).contains(&alpha) {
        return Err(Error::Domain(format!(
            "ternary entropy needs alpha in [0, 0.5], got {alpha}"
        )));
    }
    Ok(ht(alpha.clamp(0.0, 0.5)))
}

/// Unchecked ternary entropy; `alpha` must lie in `[0, 0.5]`.
#[inline]
pub(crate) fn ht(alpha: f64) -> f64 {
    debug_assert!((0.0..=0.5).contains(&alpha));
    let plogp = |p: f64| if p > 0.0 { p * p.log2() } else { 0.0 };
    -(2.0 * plogp(alpha) + plogp(1.0 - 2.0 * alpha))
}
