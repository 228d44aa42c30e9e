//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::math::mat::Mat;

/// Eigendecomposition of a symmetric PSD matrix `C = V diag(ev) V^T`.
///
/// Eigenvalues are sorted non-increasing with negatives (estimation noise)
/// clamped to zero. Eigenvectors are stored as *rows* of `vectors_t`
/// (so `vectors_t` is `V^T`), each normalized so that its entry of largest
/// magnitude is non-negative.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    eigenvalues: Vec<f64>,
    vectors_t: Mat,
}

impl SymmetricSpectrum {
    /// Eigenvalues, non-increasing, clamped at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `V^T`: row `i` is the eigenvector paired with `eigenvalues[i]`.
    pub fn vectors_t(&self) -> &Mat {
        &self.vectors_t
    }

    pub fn into_parts(self) -> (Vec<f64>, Mat) {
        (self.eigenvalues, self.vectors_t)
    }
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
///
/// Sweeps cyclic Jacobi rotations until the off-diagonal Frobenius mass
/// drops below `1e-12 * ||C||_F`. Rejects matrices whose asymmetry exceeds
/// `1e-9` relative to the largest entry.
pub fn eigh(c: &Mat) -> Result<SymmetricSpectrum> {
    let n = c.rows();
    if n != c.cols() {
        return Err(Error::ShapeMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            c.cols()
        )));
    }
    let scale = c.max_abs();
    if c.max_asymmetry() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(
            "eigh input is not symmetric within 1e-9 relative tolerance".into(),
        ));
    }

    // Work on the symmetrized copy; only the upper triangle is rotated.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (c.get(i, j) + c.get(j, i));
        }
    }
    // Rows of vt are the eigenvectors under construction.
    let mut vt = Mat::identity(n);

    let frob = c.frob();
    let target_sq = (1e-12 * frob) * (1e-12 * frob);

    let off_sq = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = a[i * n + j];
                s += 2.0 * v * v;
            }
        }
        s
    };

    let mut converged = off_sq(&a) <= target_sq;
    let mut sweep = 0;
    while !converged {
        sweep += 1;
        if sweep > MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        // Threshold strategy: early sweeps skip entries that are small
        // relative to the remaining off-diagonal mass.
        let tresh = if sweep < 4 {
            let mut sm = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    sm += a[i * n + j].abs();
                }
            }
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // Entries negligible against both diagonals are zeroed.
                if sweep > 4
                    && a[p * n + p].abs() + g == a[p * n + p].abs()
                    && a[q * n + q].abs() + g == a[q * n + q].abs()
                {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }

                let h = a[q * n + q] - a[p * n + p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                let tau = sin / (1.0 + cos);

                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;

                let rot = |x: &mut f64, y: &mut f64| {
                    let (gx, gy) = (*x, *y);
                    *x = gx - sin * (gy + tau * gx);
                    *y = gy + sin * (gx - tau * gy);
                };
                for j in 0..p {
                    let (x, y) = (a[j * n + p], a[j * n + q]);
                    let (mut x, mut y) = (x, y);
                    rot(&mut x, &mut y);
                    a[j * n + p] = x;
                    a[j * n + q] = y;
                }
                for j in (p + 1)..q {
                    let (mut x, mut y) = (a[p * n + j], a[j * n + q]);
                    rot(&mut x, &mut y);
                    a[p * n + j] = x;
                    a[j * n + q] = y;
                }
                for j in (q + 1)..n {
                    let (mut x, mut y) = (a[p * n + j], a[q * n + j]);
                    rot(&mut x, &mut y);
                    a[p * n + j] = x;
                    a[q * n + j] = y;
                }
                // Rotate the two eigenvector rows (contiguous).
                rotate_rows(&mut vt, p, q, sin, tau);
            }
        }
        converged = off_sq(&a) <= target_sq;
    }

    // Sort by descending eigenvalue, ties broken by original index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap()
            .then(i.cmp(&j))
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut sorted = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(a[src * n + src].max(0.0));
        sorted.row_mut(dst).copy_from_slice(vt.row(src));
    }

    // Sign convention: the entry of largest magnitude in each eigenvector
    // is non-negative (first such entry wins on ties).
    for i in 0..n {
        let row = sorted.row_mut(i);
        let mut best = 0usize;
        for (k, v) in row.iter().enumerate() {
            if v.abs() > row[best].abs() {
                best = k;
            }
        }
        if row[best] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }

    Ok(SymmetricSpectrum {
        eigenvalues,
        vectors_t: sorted,
    })
}

#[inline]
fn rotate_rows(vt: &mut Mat, p: usize, q: usize, sin: f64, tau: f64) {
    let (a, b) = vt.two_rows_mut(p, q);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (gx, gy) = (*x, *y);
        *x = gx - sin * (gy + tau * gx);
        *y = gy + sin * (gx - tau * gy);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reconstruct(s: &SymmetricSpectrum) -> Mat {
        let n = s.eigenvalues().len();
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            let v = s.vectors_t().row(k);
            let lam = s.eigenvalues()[k];
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, m.get(i, j) + lam * v[i] * v[j]);
                }
            }
        }
        m
    }

    #[test]
    fn identity_matrix() {
        let s = eigh(&Mat::identity(4)).unwrap();
        for &v in s.eigenvalues() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        }
        // Eigenvectors form a signed permutation of the identity.
        for i in 0..4 {
            let row = s.vectors_t().row(i);
            let nonzero: Vec<_> = row.iter().filter(|v| v.abs() > 1e-12).collect();
            assert_eq!(nonzero.len(), 1);
            assert!(*nonzero[0] > 0.0, "sign convention violated");
        }
    }

    #[test]
    fn diagonal_matrix() {
        let c = Mat::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = eigh(&c).unwrap();
        assert_abs_diff_eq!(s.eigenvalues()[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues()[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.vectors_t().get(0, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.vectors_t().get(1, 1), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_by_two_correlated() {
        // [[1, rho], [rho, 1]] has eigenvalues 1 +/- rho (characteristic
        // polynomial (1 - l)^2 = rho^2).
        let c = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let s = eigh(&c).unwrap();
        assert_abs_diff_eq!(s.eigenvalues()[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let c = Mat::from_rows(&[vec![1.0, 0.3], vec![0.1, 1.0]]).unwrap();
        assert!(matches!(eigh(&c), Err(Error::Domain(_))));
    }

    #[test]
    fn random_psd_reconstruction() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 5, 16, 33] {
            // PSD by construction: G G^T.
            let g: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let gm = Mat::from_vec(n, n, g).unwrap();
            let c = gm.matmul(&gm.transpose()).unwrap();
            let s = eigh(&c).unwrap();

            let rec = reconstruct(&s);
            let scale = c.max_abs();
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (rec.get(i, j) - c.get(i, j)).abs() <= 1e-7 * scale,
                        "reconstruction off at ({i},{j}) for n={n}"
                    );
                }
            }
            // Orthonormality: V^T V = I.
            let vt = s.vectors_t();
            for i in 0..n {
                for j in 0..n {
                    let d = crate::math::dot(vt.row(i), vt.row(j));
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() <= 1e-8, "orthonormality off at ({i},{j})");
                }
            }
            // Sorted non-increasing, non-negative.
            for w in s.eigenvalues().windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(s.eigenvalues().iter().all(|&v| v >= 0.0));
        }
    }
}
