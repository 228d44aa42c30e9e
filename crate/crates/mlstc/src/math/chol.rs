//! Cholesky factorization and SPD solves with optional ridge fallback.

use crate::error::{Error, Result};
use crate::math::mat::Mat;

/// Lower-triangular Cholesky factor of an SPD matrix, plus a condition
/// estimate `(max L_ii / min L_ii)^2`.
fn cholesky(a: &Mat) -> Result<(Mat, f64)> {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let mut l = Mat::zeros(n, n);
    let mut min_d = f64::INFINITY;
    let mut max_d = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Singular(format!(
                        "non-positive pivot {s:e} at row {i}"
                    )));
                }
                let d = s.sqrt();
                min_d = min_d.min(d);
                max_d = max_d.max(d);
                l.set(i, j, d);
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    let cond = (max_d / min_d).powi(2);
    Ok((l, cond))
}

/// Solves `A X = B` for SPD `A` via Cholesky.
pub fn solve_spd(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.rows() != a.cols() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "solve_spd: A is {}x{}, B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (l, _) = cholesky(a)?;
    Ok(solve_with_factor(&l, b))
}

/// Solves `A X = B`, adding a ridge `1e-8 * trace(A)/n * I` when `A` is
/// ill-conditioned (condition estimate above 1e12) or fails to factor.
///
/// Returns `Singular` if the ridge itself would be zero (zero trace).
pub fn solve_spd_ridged(a: &Mat, b: &Mat) -> Result<Mat> {
    match cholesky(a) {
        Ok((l, cond)) if cond <= 1e12 => return Ok(solve_with_factor(&l, b)),
        Ok(_) | Err(Error::Singular(_)) => {}
        Err(e) => return Err(e),
    }
    let n = a.rows();
    let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
    if trace <= 0.0 {
        return Err(Error::Singular("cannot regularize a zero-trace system".into()));
    }
    let ridge = 1e-8 * trace / n as f64;
    let mut reg = a.clone();
    for i in 0..n {
        reg.set(i, i, reg.get(i, i) + ridge);
    }
    let (l, _) = cholesky(&reg)?;
    Ok(solve_with_factor(&l, b))
}

fn solve_with_factor(l: &Mat, b: &Mat) -> Mat {
    let n = l.rows();
    let m = b.cols();
    let mut x = b.clone();
    // Forward substitution L Y = B.
    for i in 0..n {
        for k in 0..i {
            let lik = l.get(i, k);
            if lik != 0.0 {
                for c in 0..m {
                    let v = x.get(i, c) - lik * x.get(k, c);
                    x.set(i, c, v);
                }
            }
        }
        let d = l.get(i, i);
        for c in 0..m {
            x.set(i, c, x.get(i, c) / d);
        }
    }
    // Back substitution L^T X = Y.
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l.get(k, i);
            if lki != 0.0 {
                for c in 0..m {
                    let v = x.get(i, c) - lki * x.get(k, c);
                    x.set(i, c, v);
                }
            }
        }
        let d = l.get(i, i);
        for c in 0..m {
            x.set(i, c, x.get(i, c) / d);
        }
    }
    x
}
