use crate::error::{Error, Result};
use crate::par;

/// Dense row-major matrix. Used for operators (projections, covariances,
/// decoders); data vectors live in [`VectorSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "ragged rows: expected {c}, got {}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: r, cols: c, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mutable views of two distinct rows `p < q`.
    pub(crate) fn two_rows_mut(&mut self, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(p < q);
        let n = self.cols;
        let (left, right) = self.data.split_at_mut(q * n);
        (&mut left[p * n..p * n + n], &mut right[..n])
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    /// `y = self * x` for a dense vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Frobenius norm.
    pub fn frob(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|` over the square matrix.
    pub fn max_asymmetry(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `self * other` (naive; operator-sized matrices only).
    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let a_row = self.row(r);
            let out_row = out.row_mut(r);
            for (k, &a) in a_row.iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }
}

/// A set of `len` vectors of dimension `dim`, one vector per contiguous
/// column (column-major storage).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    dim: usize,
    data: Vec<f64>,
}

impl VectorSet {
    pub fn zeros(dim: usize, len: usize) -> Self {
        VectorSet {
            dim,
            data: vec![0.0; dim * len],
        }
    }

    pub fn from_columns(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::ShapeMismatch(format!(
                "buffer of {} entries is not a whole number of dim-{dim} columns",
                data.len()
            )));
        }
        Ok(VectorSet { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors.
    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_cols(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Builds a set by evaluating `f` on every index, in parallel when the
    /// `parallel` feature is on; column order is always `0..len`.
    pub fn from_fn(dim: usize, len: usize, f: impl Fn(usize) -> Vec<f64> + Sync + Send) -> Self {
        let cols = par::map_indexed(len, f);
        let mut data = Vec::with_capacity(dim * len);
        for col in cols {
            debug_assert_eq!(col.len(), dim);
            data.extend_from_slice(&col);
        }
        VectorSet { dim, data }
    }

    /// `self -= other`, column by column.
    pub fn sub_assign(&mut self, other: &VectorSet) -> Result<()> {
        if self.dim != other.dim || self.data.len() != other.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "subtracting {}x{} set from {}x{}",
                other.dim,
                other.len(),
                self.dim,
                self.len()
            )));
        }
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(())
    }

    /// Mean squared entry, `sum(x^2) / (dim * len)`.
    pub fn mean_square(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|v| v * v).sum::<f64>() / self.data.len() as f64
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Dot product with four independent accumulators so LLVM can vectorize.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let k = i * 4;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in chunks * 4..a.len() {
        tail += a[k] * b[k];
    }
    acc[0] + acc[1] + acc[2] + acc[3] + tail
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * xi;
    }
}

/// Column mean of a vector set.
pub fn column_mean(set: &VectorSet) -> Vec<f64> {
    let n = set.dim();
    let count = set.len();
    let mut mean = vec![0.0; n];
    if count == 0 {
        return mean;
    }
    let partials = par::map_chunks(count, par::COLUMN_CHUNK, |range| {
        let mut acc = vec![0.0; n];
        for j in range {
            for (a, v) in acc.iter_mut().zip(set.col(j)) {
                *a += v;
            }
        }
        acc
    });
    for acc in partials {
        for (m, a) in mean.iter_mut().zip(acc) {
            *m += a;
        }
    }
    let inv = 1.0 / count as f64;
    for m in &mut mean {
        *m *= inv;
    }
    mean
}

/// Sample covariance `(1/N) sum (f - mean)(f - mean)^T` of the columns.
///
/// The mean is estimated from the same columns and subtracted; callers that
/// already centered the data can pass a zero mean via [`covariance_about`].
pub fn estimate_covariance(set: &VectorSet) -> Result<Mat> {
    if set.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "covariance needs at least 2 columns, got {}",
            set.len()
        )));
    }
    let mean = column_mean(set);
    Ok(covariance_about(set, &mean))
}

/// Sample covariance around a given center, `(1/N) sum (f - mean)(f - mean)^T`.
pub fn covariance_about(set: &VectorSet, mean: &[f64]) -> Mat {
    let n = set.dim();
    debug_assert_eq!(mean.len(), n);
    let count = set.len();
    let zero_mean = mean.iter().all(|&m| m == 0.0);

    // Accumulate the upper triangle per column chunk, then combine the
    // chunk buffers in index order so the result is scheduling-independent.
    let partials = par::map_chunks(count, par::COLUMN_CHUNK, |range| {
        let mut acc = vec![0.0; n * n];
        let mut centered = vec![0.0; n];
        for j in range {
            let col = set.col(j);
            let c: &[f64] = if zero_mean {
                col
            } else {
                for ((d, v), m) in centered.iter_mut().zip(col).zip(mean) {
                    *d = v - m;
                }
                &centered
            };
            for i in 0..n {
                let ci = c[i];
                if ci != 0.0 {
                    axpy(ci, &c[i..], &mut acc[i * n + i..i * n + n]);
                }
            }
        }
        acc
    });

    let mut cov = Mat::zeros(n, n);
    for acc in partials {
        for (c, a) in cov.data.iter_mut().zip(acc) {
            *c += a;
        }
    }
    let inv = 1.0 / count as f64;
    for i in 0..n {
        for j in i..n {
            let v = cov.data[i * n + j] * inv;
            cov.data[i * n + j] = v;
            cov.data[j * n + i] = v;
        }
    }
    cov
}

/// `A * B^T` where both operands are column sets sharing the column count:
/// `A` is `n x N`, `B` is `k x N`, result is `n x k`.
pub fn cross_gram(a: &VectorSet, b: &VectorSet) -> Result<Mat> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "cross product over {} vs {} columns",
            a.len(),
            b.len()
        )));
    }
    let n = a.dim();
    let k = b.dim();
    let partials = par::map_chunks(a.len(), par::COLUMN_CHUNK, |range| {
        let mut acc = vec![0.0; n * k];
        for j in range {
            let x = a.col(j);
            let y = b.col(j);
            for i in 0..n {
                if x[i] != 0.0 {
                    axpy(x[i], y, &mut acc[i * k..(i + 1) * k]);
                }
            }
        }
        acc
    });
    let mut out = Mat::zeros(n, k);
    for acc in partials {
        for (c, v) in out.data.iter_mut().zip(acc) {
            *c += v;
        }
    }
    Ok(out)
}
