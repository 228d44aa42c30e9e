//! Binary-hashing reference points: PCA hashing with per-dimension
//! re-weighting, and random-projection sign hashing (Sim-Hash) decoded by a
//! learned pseudo-inverse plus one global scale factor.
//!
//! Rate accounting for both is the raw `k/n` bits per dimension - a dense
//! bit per coded dimension, with no entropy discount.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math::{
    axpy, column_mean, covariance_about, cross_gram, dot, eigh, solve_spd_ridged, Mat, VectorSet,
};
use crate::par;
use crate::quantizer::{self, ternary_symbol};

/// Sign-of-top-eigenprojection codes with per-dimension magnitudes
/// `beta_i = sigma_i sqrt(2/pi)` applied at reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaHashModel {
    mean: Vec<f64>,
    /// `k x n`: the top-k eigenvector transposes.
    projector: Mat,
    beta: Vec<f64>,
    dim: usize,
}

/// Sign-of-random-projection codes; reconstruction is a learned
/// least-squares decoder followed by a global scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct LshModel {
    mean: Vec<f64>,
    /// `k x n` Gaussian projector.
    projector: Mat,
    /// `n x k` learned decoder `F X^T (X X^T)^{-1}`.
    decoder: Mat,
    global_beta: f64,
    dim: usize,
}

/// Trains PCA hashing with `k` bits per vector (`k <= n`).
pub fn train_pca_hash(data: &VectorSet, bits: usize) -> Result<PcaHashModel> {
    let n = data.dim();
    if bits > n {
        return Err(Error::Domain(format!(
            "PCA hashing supports at most n = {n} bits, asked for {bits}"
        )));
    }
    if data.len() < 2 {
        return Err(Error::InsufficientData(
            "PCA hashing needs at least 2 training vectors".into(),
        ));
    }
    let mean = column_mean(data);
    let cov = covariance_about(data, &mean);
    if cov.max_abs() == 0.0 {
        return Err(Error::DegenerateData(
            "training data has an all-zero covariance".into(),
        ));
    }
    let (mut eigenvalues, vectors_t) = eigh(&cov)?.into_parts();
    crate::math::clamp_spectrum(&mut eigenvalues);

    let mut projector = Mat::zeros(bits, n);
    let mut beta = Vec::with_capacity(bits);
    for i in 0..bits {
        projector.row_mut(i).copy_from_slice(vectors_t.row(i));
        // Binary case of the ternary magnitude: beta = sigma sqrt(2/pi).
        beta.push(quantizer::optimal_beta(eigenvalues[i].sqrt(), 0.0));
    }
    Ok(PcaHashModel {
        mean,
        projector,
        beta,
        dim: n,
    })
}

impl PcaHashModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> usize {
        self.projector.rows()
    }

    /// Bits per dimension: `k / n` exactly.
    pub fn rate(&self) -> f64 {
        self.bits() as f64 / self.dim as f64
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn projector(&self) -> &Mat {
        &self.projector
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub(crate) fn from_parts(mean: Vec<f64>, projector: Mat, beta: Vec<f64>) -> Result<Self> {
        let dim = projector.cols();
        if mean.len() != dim || beta.len() != projector.rows() {
            return Err(Error::ShapeMismatch(
                "inconsistent PCA hash model parts".into(),
            ));
        }
        Ok(PcaHashModel {
            mean,
            projector,
            beta,
            dim,
        })
    }

    /// Keeps only the top `bits` coded directions (shared eigenbasis).
    pub fn truncated(&self, bits: usize) -> Result<PcaHashModel> {
        if bits > self.bits() {
            return Err(Error::Domain(format!(
                "cannot widen a {}-bit model to {bits} bits",
                self.bits()
            )));
        }
        let mut projector = Mat::zeros(bits, self.dim);
        for i in 0..bits {
            projector.row_mut(i).copy_from_slice(self.projector.row(i));
        }
        Ok(PcaHashModel {
            mean: self.mean.clone(),
            projector,
            beta: self.beta[..bits].to_vec(),
            dim: self.dim,
        })
    }

    pub fn encode(&self, f: &[f64]) -> Result<Vec<i8>> {
        if f.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "encode got length {}, model expects {}",
                f.len(),
                self.dim
            )));
        }
        let centered: Vec<f64> = f.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok((0..self.bits())
            .map(|i| ternary_symbol(dot(self.projector.row(i), &centered), 0.0))
            .collect())
    }

    pub fn decode(&self, code: &[i8]) -> Result<Vec<f64>> {
        if code.len() != self.bits() {
            return Err(Error::ShapeMismatch(format!(
                "decode got {} bits, model expects {}",
                code.len(),
                self.bits()
            )));
        }
        let mut out = self.mean.clone();
        for (i, &s) in code.iter().enumerate() {
            if s != 0 {
                axpy(f64::from(s) * self.beta[i], self.projector.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn encode_set(&self, data: &VectorSet) -> Result<Vec<Vec<i8>>> {
        if data.dim() != self.dim {
            return Err(Error::ShapeMismatch("encode_set dimension mismatch".into()));
        }
        Ok(par::map_indexed(data.len(), |j| {
            self.encode(data.col(j)).expect("dimension checked")
        }))
    }

    pub fn decode_set(&self, codes: &[Vec<i8>]) -> Result<VectorSet> {
        for c in codes {
            if c.len() != self.bits() {
                return Err(Error::ShapeMismatch("decode_set width mismatch".into()));
            }
        }
        Ok(VectorSet::from_fn(self.dim, codes.len(), |j| {
            self.decode(&codes[j]).expect("validated above")
        }))
    }
}

/// Trains Sim-Hash with `k` random sign bits and a pseudo-inverse decoder.
pub fn train_lsh(data: &VectorSet, bits: usize, seed: u64) -> Result<LshModel> {
    Ok(train_lsh_family(data, &[bits], seed)?.pop().expect("one model"))
}

/// Trains Sim-Hash decoders at several code widths from one seeded
/// projector: width `k` uses the first `k` projector rows, and the Gram and
/// cross matrices of the widest code are computed once and sliced.
///
/// Statistically equivalent to independent projectors per width (the rows
/// are i.i.d.), and much cheaper for rate sweeps.
pub fn train_lsh_family(data: &VectorSet, bits_list: &[usize], seed: u64) -> Result<Vec<LshModel>> {
    let n = data.dim();
    let &k_max = bits_list
        .iter()
        .max()
        .ok_or_else(|| Error::Domain("LSH needs at least one code width".into()))?;
    if bits_list.iter().any(|&k| k == 0) {
        return Err(Error::Domain("LSH needs at least one bit".into()));
    }
    if data.len() < k_max.max(2) {
        return Err(Error::InsufficientData(format!(
            "LSH decoder needs at least {} training vectors, got {}",
            k_max.max(2),
            data.len()
        )));
    }
    let mean = column_mean(data);
    let centered_energy = {
        let cov = covariance_about(data, &mean);
        cov.max_abs()
    };
    if centered_energy == 0.0 {
        return Err(Error::DegenerateData(
            "training data has an all-zero covariance".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut projector = Mat::zeros(k_max, n);
    for i in 0..k_max {
        for v in projector.row_mut(i) {
            *v = rng.sample(StandardNormal);
        }
    }

    // Codes on centered data, as +/-1 columns.
    let centered = center(data, &mean);
    let codes = sign_project(&projector, &centered);

    let fxt_full = cross_gram(&centered, &codes)?; // n x k_max
    let gram_full = cross_gram(&codes, &codes)?; // k_max x k_max

    let mut models = Vec::with_capacity(bits_list.len());
    for &k in bits_list {
        let mut gram = Mat::zeros(k, k);
        for i in 0..k {
            gram.row_mut(i).copy_from_slice(&gram_full.row(i)[..k]);
        }
        // rhs for W^T: the transpose of the first k columns of F X^T.
        let mut fxt_t = Mat::zeros(k, n);
        for i in 0..k {
            for j in 0..n {
                fxt_t.set(i, j, fxt_full.get(j, i));
            }
        }
        let wt = solve_spd_ridged(&gram, &fxt_t)?; // k x n
        let decoder = wt.transpose(); // n x k

        let mut proj_k = Mat::zeros(k, n);
        for i in 0..k {
            proj_k.row_mut(i).copy_from_slice(projector.row(i));
        }
        let mut model = LshModel {
            mean: mean.clone(),
            projector: proj_k,
            decoder,
            global_beta: 1.0,
            dim: n,
        };
        // Global scale fitted on the unscaled training reconstruction.
        let code_prefixes: Vec<Vec<i8>> = (0..codes.len())
            .map(|j| codes.col(j)[..k].iter().map(|&v| v as i8).collect())
            .collect();
        let recon = model.decode_set(&code_prefixes)?;
        model.global_beta = global_scalar_beta(data, &recon)?;
        models.push(model);
    }
    Ok(models)
}

impl LshModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> usize {
        self.projector.rows()
    }

    pub fn rate(&self) -> f64 {
        self.bits() as f64 / self.dim as f64
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn projector(&self) -> &Mat {
        &self.projector
    }

    pub fn decoder(&self) -> &Mat {
        &self.decoder
    }

    pub fn global_beta(&self) -> f64 {
        self.global_beta
    }

    pub(crate) fn from_parts(
        mean: Vec<f64>,
        projector: Mat,
        decoder: Mat,
        global_beta: f64,
    ) -> Result<Self> {
        let dim = decoder.rows();
        if projector.cols() != dim
            || projector.rows() != decoder.cols()
            || mean.len() != dim
        {
            return Err(Error::ShapeMismatch("inconsistent LSH model parts".into()));
        }
        Ok(LshModel {
            mean,
            projector,
            decoder,
            global_beta,
            dim,
        })
    }

    pub fn encode(&self, f: &[f64]) -> Result<Vec<i8>> {
        if f.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "encode got length {}, model expects {}",
                f.len(),
                self.dim
            )));
        }
        let centered: Vec<f64> = f.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok((0..self.bits())
            .map(|i| ternary_symbol(dot(self.projector.row(i), &centered), 0.0))
            .collect())
    }

    pub fn decode(&self, code: &[i8]) -> Result<Vec<f64>> {
        if code.len() != self.bits() {
            return Err(Error::ShapeMismatch(format!(
                "decode got {} bits, model expects {}",
                code.len(),
                self.bits()
            )));
        }
        let x: Vec<f64> = code.iter().map(|&s| f64::from(s)).collect();
        let wx = self.decoder.mul_vec(&x);
        Ok(wx
            .iter()
            .zip(&self.mean)
            .map(|(v, m)| self.global_beta * (v + m))
            .collect())
    }

    pub fn encode_set(&self, data: &VectorSet) -> Result<Vec<Vec<i8>>> {
        if data.dim() != self.dim {
            return Err(Error::ShapeMismatch("encode_set dimension mismatch".into()));
        }
        Ok(par::map_indexed(data.len(), |j| {
            self.encode(data.col(j)).expect("dimension checked")
        }))
    }

    pub fn decode_set(&self, codes: &[Vec<i8>]) -> Result<VectorSet> {
        for c in codes {
            if c.len() != self.bits() {
                return Err(Error::ShapeMismatch("decode_set width mismatch".into()));
            }
        }
        Ok(VectorSet::from_fn(self.dim, codes.len(), |j| {
            self.decode(&codes[j]).expect("validated above")
        }))
    }
}

/// The scalar minimizing `||F - beta Fhat||_F^2`:
/// `beta = Tr[F Fhat^T] / Tr[Fhat Fhat^T]`.
pub fn global_scalar_beta(original: &VectorSet, reconstruction: &VectorSet) -> Result<f64> {
    if original.dim() != reconstruction.dim() || original.len() != reconstruction.len() {
        return Err(Error::ShapeMismatch(
            "global beta needs matching shapes".into(),
        ));
    }
    let num = dot(original.as_slice(), reconstruction.as_slice());
    let den = dot(reconstruction.as_slice(), reconstruction.as_slice());
    if den == 0.0 {
        return Err(Error::DegenerateData(
            "reconstruction is identically zero".into(),
        ));
    }
    Ok(num / den)
}

fn center(data: &VectorSet, mean: &[f64]) -> VectorSet {
    VectorSet::from_fn(data.dim(), data.len(), |j| {
        data.col(j).iter().zip(mean).map(|(v, m)| v - m).collect()
    })
}

fn sign_project(projector: &Mat, centered: &VectorSet) -> VectorSet {
    let k = projector.rows();
    VectorSet::from_fn(k, centered.len(), |j| {
        let col = centered.col(j);
        (0..k)
            .map(|i| f64::from(ternary_symbol(dot(projector.row(i), col), 0.0)))
            .collect()
    })
}
