//! The trainable codec: a decorrelating projection followed by ternary
//! thresholding with per-dimension re-weighting, and its multi-layer
//! extension in which every layer codes the residual left by the previous
//! ones.
//!
//! Encoding a vector `f` against a layer produces
//! `x = phi_lambda(A (f - mean)) .* beta` where `A` packs the eigenvectors
//! of the training covariance as rows; decoding is `A^T x (+ mean)`, the
//! orthonormal back-projection. Trained layers are immutable; encode and
//! decode are pure and safe to run concurrently across vectors.

pub mod io;

use crate::error::{Error, Result};
use crate::math::{
    self, axpy, clamp_spectrum, column_mean, covariance_about, cross_gram, dot, eigh, Mat,
    VectorSet,
};
use crate::par;
use crate::quantizer::{self, ternary_symbol};

/// A centered eigenbasis fitted to training data, from which layers at any
/// threshold can be cut without re-running the eigensolver.
#[derive(Debug, Clone)]
pub struct TrainedBasis {
    mean: Vec<f64>,
    projection: Mat,
    sigma: Vec<f64>,
}

impl TrainedBasis {
    /// Fits mean, eigenbasis, and projected standard deviations.
    pub fn estimate(data: &VectorSet) -> Result<Self> {
        Self::fit(data, true)
    }

    /// Same, but assumes the data is already centered (residual layers).
    pub fn estimate_zero_mean(data: &VectorSet) -> Result<Self> {
        Self::fit(data, false)
    }

    fn fit(data: &VectorSet, center: bool) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "training needs at least 2 vectors, got {}",
                data.len()
            )));
        }
        let mean = if center {
            column_mean(data)
        } else {
            vec![0.0; data.dim()]
        };
        let cov = covariance_about(data, &mean);
        if cov.max_abs() == 0.0 {
            return Err(Error::DegenerateData(
                "training data has an all-zero covariance".into(),
            ));
        }
        let (mut eigenvalues, projection) = eigh(&cov)?.into_parts();
        clamp_spectrum(&mut eigenvalues);
        let sigma = eigenvalues.iter().map(|v| v.sqrt()).collect();
        Ok(TrainedBasis {
            mean,
            projection,
            sigma,
        })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn spectrum_sq(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }

    /// Cuts a layer at an explicit threshold.
    pub fn layer(&self, lambda: f64) -> Result<LayerParams> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        let beta = self
            .sigma
            .iter()
            .map(|&s| quantizer::optimal_beta(s, lambda))
            .collect();
        let alpha = self
            .sigma
            .iter()
            .map(|&s| quantizer::activation(s, lambda))
            .collect();
        Ok(LayerParams {
            projection: self.projection.clone(),
            mean: self.mean.clone(),
            lambda,
            beta,
            sigma: self.sigma.clone(),
            alpha,
        })
    }

    /// Cuts the layer whose analytic rate matches `rate_budget` bits/dim.
    pub fn layer_for_rate(&self, rate_budget: f64) -> Result<LayerParams> {
        let lambda = quantizer::lambda_for_rate(&self.spectrum_sq(), rate_budget)?;
        self.layer(lambda)
    }
}

/// One ternary coding layer: orthonormal projection (rows are the
/// eigenvector transposes), the mean subtracted before layer 1, the shared
/// threshold, and the per-dimension magnitudes/activities.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    projection: Mat,
    mean: Vec<f64>,
    lambda: f64,
    beta: Vec<f64>,
    sigma: Vec<f64>,
    alpha: Vec<f64>,
}

impl LayerParams {
    /// Validating constructor: checks vector lengths and that the projection
    /// is square and orthonormal (`||A A^T - I||_max <= 1e-8`).
    pub fn new(
        projection: Mat,
        mean: Vec<f64>,
        lambda: f64,
        beta: Vec<f64>,
        sigma: Vec<f64>,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        let n = projection.rows();
        if projection.cols() != n {
            return Err(Error::ShapeMismatch(
                "layer projection must be square".into(),
            ));
        }
        for (name, v) in [("mean", &mean), ("beta", &beta), ("sigma", &sigma), ("alpha", &alpha)] {
            if v.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
        }
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        for i in 0..n {
            for j in i..n {
                let d = dot(projection.row(i), projection.row(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                if (d - expect).abs() > 1e-8 {
                    return Err(Error::Domain(format!(
                        "projection is not orthonormal at ({i},{j}): {d}"
                    )));
                }
            }
        }
        Ok(LayerParams {
            projection,
            mean,
            lambda,
            beta,
            sigma,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn projection(&self) -> &Mat {
        &self.projection
    }

    /// Mean ternary entropy of the layer's symbols, bits/dimension.
    pub fn analytic_rate(&self) -> f64 {
        let sum: f64 = self
            .alpha
            .iter()
            .map(|&a| crate::math::ternary_entropy(a).unwrap_or(0.0))
            .sum();
        sum / self.dim() as f64
    }

    /// Encodes one vector into its signed support set.
    pub fn encode(&self, f: &[f64], layer_id: u32) -> Result<TernaryCode> {
        let n = self.dim();
        if f.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "encode got a vector of length {}, layer dimension is {n}",
                f.len()
            )));
        }
        let centered: Vec<f64> = f.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        let mut support = Vec::new();
        for i in 0..n {
            // Dead coordinates (zero variance or a floored magnitude) are
            // never coded.
            if self.beta[i] <= 0.0 {
                continue;
            }
            let y = dot(self.projection.row(i), &centered);
            let s = ternary_symbol(y, self.lambda);
            if s != 0 {
                support.push((i as u32, s));
            }
        }
        Ok(TernaryCode { layer_id, support })
    }

    /// Decodes a code back to the signal domain: `A^T (sign .* beta) + mean`.
    pub fn decode(&self, code: &TernaryCode) -> Result<Vec<f64>> {
        let mut out = self.mean.clone();
        self.accumulate_sparse(code, &mut out)?;
        Ok(out)
    }

    /// Adds `A^T (sign .* beta)` into `out`, without the mean term.
    fn accumulate_sparse(&self, code: &TernaryCode, out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        for &(idx, sign) in &code.support {
            let i = idx as usize;
            if i >= n {
                return Err(Error::Domain(format!(
                    "code index {i} out of range for dimension {n}"
                )));
            }
            axpy(f64::from(sign) * self.beta[i], self.projection.row(i), out);
        }
        Ok(())
    }

    /// Encodes every column; deterministic column order, parallel when the
    /// `parallel` feature is enabled.
    pub fn encode_set(&self, data: &VectorSet, layer_id: u32) -> Result<Vec<TernaryCode>> {
        if data.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "encode_set got dimension {}, layer expects {}",
                data.dim(),
                self.dim()
            )));
        }
        Ok(par::map_indexed(data.len(), |j| {
            self.encode(data.col(j), layer_id).expect("dimension checked")
        }))
    }

    /// Decodes a batch of codes into a vector set.
    pub fn decode_set(&self, codes: &[TernaryCode]) -> Result<VectorSet> {
        for c in codes {
            c.validate(self.dim() as u32)?;
        }
        let n = self.dim();
        Ok(VectorSet::from_fn(n, codes.len(), |j| {
            let mut out = self.mean.clone();
            self.accumulate_sparse(&codes[j], &mut out)
                .expect("validated above");
            out
        }))
    }

    /// Least-squares decoder correction `B' = A F X^T (X X^T)^{-1}`, learned
    /// on the given training data.
    ///
    /// Kept as a verification operation: with the eigenbasis projection and
    /// optimal magnitudes it converges to the identity as the sample count
    /// grows, which is why the default decode path fixes `B = A^T`.
    /// Requires at least `n` samples; an ill-conditioned Gram matrix is
    /// ridge-regularized.
    pub fn learn_bprime(&self, data: &VectorSet) -> Result<Mat> {
        let n = self.dim();
        if data.dim() != n {
            return Err(Error::ShapeMismatch(format!(
                "learn_bprime got dimension {}, layer expects {n}",
                data.dim()
            )));
        }
        if data.len() < n {
            return Err(Error::Singular(format!(
                "X X^T is rank-deficient: {} samples for dimension {n}",
                data.len()
            )));
        }
        // Projected data and dense magnitudes-applied codes.
        let projected = self.project_set(data);
        let codes = VectorSet::from_fn(n, data.len(), |j| {
            projected
                .col(j)
                .iter()
                .enumerate()
                .map(|(i, &y)| f64::from(ternary_symbol(y, self.lambda)) * self.beta[i])
                .collect()
        });
        let m = cross_gram(&projected, &codes)?; // A F X^T
        let g = cross_gram(&codes, &codes)?; // X X^T
        let bt = math::solve_spd_ridged(&g, &m.transpose())?;
        Ok(bt.transpose())
    }

    /// Projects every centered column: `A (f - mean)`.
    pub fn project_set(&self, data: &VectorSet) -> VectorSet {
        let n = self.dim();
        VectorSet::from_fn(n, data.len(), |j| {
            let centered: Vec<f64> = data
                .col(j)
                .iter()
                .zip(&self.mean)
                .map(|(v, m)| v - m)
                .collect();
            self.projection.mul_vec(&centered)
        })
    }
}

/// Sparse ternary code of one vector: sorted signed support positions. The
/// magnitudes live in the owning layer, so decoding is deterministic given
/// the layer parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryCode {
    layer_id: u32,
    support: Vec<(u32, i8)>,
}

impl TernaryCode {
    /// Builds a code, enforcing strictly increasing indices and signs in
    /// `{-1, +1}`.
    pub fn new(layer_id: u32, support: Vec<(u32, i8)>) -> Result<Self> {
        for w in support.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(
                    "code support indices must be strictly increasing".into(),
                ));
            }
        }
        if support.iter().any(|&(_, s)| s != 1 && s != -1) {
            return Err(Error::Domain("code signs must be +1 or -1".into()));
        }
        Ok(TernaryCode { layer_id, support })
    }

    pub fn layer_id(&self) -> u32 {
        self.layer_id
    }

    pub fn support(&self) -> &[(u32, i8)] {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    fn validate(&self, dim: u32) -> Result<()> {
        if let Some(&(idx, _)) = self.support.last() {
            if idx >= dim {
                return Err(Error::Domain(format!(
                    "code index {idx} out of range for dimension {dim}"
                )));
            }
        }
        Ok(())
    }
}

/// An ordered stack of residual-coding layers with per-layer rate
/// bookkeeping. Decoding any prefix of layers is valid.
#[derive(Debug, Clone)]
pub struct MLModel {
    layers: Vec<LayerParams>,
    per_layer_rate: Vec<f64>,
}

impl MLModel {
    pub fn from_layers(layers: Vec<LayerParams>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Domain("a model needs at least one layer".into()));
        }
        let n = layers[0].dim();
        if layers.iter().any(|l| l.dim() != n) {
            return Err(Error::ShapeMismatch(
                "all layers must share one dimension".into(),
            ));
        }
        let per_layer_rate = layers.iter().map(|l| l.analytic_rate()).collect();
        Ok(MLModel {
            layers,
            per_layer_rate,
        })
    }

    pub fn dim(&self) -> usize {
        self.layers[0].dim()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn per_layer_rate(&self) -> &[f64] {
        &self.per_layer_rate
    }

    /// Analytic rate of the first `k` layers, bits/dimension.
    pub fn cumulative_rate(&self, k: usize) -> f64 {
        self.per_layer_rate[..k].iter().sum()
    }

    /// Runs the residual recursion over the frozen layers.
    pub fn encode(&self, f: &[f64]) -> Result<Vec<TernaryCode>> {
        let mut resid = f.to_vec();
        let mut codes = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let code = layer.encode(&resid, l as u32)?;
            let recon = layer.decode(&code)?;
            for (r, v) in resid.iter_mut().zip(recon) {
                *r -= v;
            }
            codes.push(code);
        }
        Ok(codes)
    }

    /// Sums the back-projections of the first `up_to` layers (all when
    /// `None`); `up_to = 0` reproduces the training mean.
    pub fn decode(&self, codes: &[TernaryCode], up_to: Option<usize>) -> Result<Vec<f64>> {
        if codes.len() != self.layers.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} codes for a {}-layer model",
                codes.len(),
                self.layers.len()
            )));
        }
        let k = up_to.unwrap_or(self.layers.len());
        if k > self.layers.len() {
            return Err(Error::Domain(format!(
                "cannot decode {k} layers of a {}-layer model",
                self.layers.len()
            )));
        }
        // The mean enters once; residual layers carry zero means.
        let mut out = self.layers[0].mean().to_vec();
        for l in 0..k {
            self.layers[l].accumulate_sparse(&codes[l], &mut out)?;
        }
        Ok(out)
    }

    /// Batch encode; codes come back as one `Vec` per vector.
    pub fn encode_set(&self, data: &VectorSet) -> Result<Vec<Vec<TernaryCode>>> {
        if data.dim() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "encode_set got dimension {}, model expects {}",
                data.dim(),
                self.dim()
            )));
        }
        Ok(par::map_indexed(data.len(), |j| {
            self.encode(data.col(j)).expect("dimension checked")
        }))
    }

    /// Batch decode of per-vector code stacks.
    pub fn decode_set(&self, codes: &[Vec<TernaryCode>], up_to: Option<usize>) -> Result<VectorSet> {
        let k = up_to.unwrap_or(self.layers.len());
        if k > self.layers.len() {
            return Err(Error::Domain(format!(
                "cannot decode {k} layers of a {}-layer model",
                self.layers.len()
            )));
        }
        for stack in codes {
            if stack.len() != self.layers.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} codes for a {}-layer model",
                    stack.len(),
                    self.layers.len()
                )));
            }
            for (l, c) in stack.iter().enumerate() {
                let _ = l;
                c.validate(self.dim() as u32)?;
            }
        }
        Ok(VectorSet::from_fn(self.dim(), codes.len(), |j| {
            self.decode(&codes[j], Some(k)).expect("validated above")
        }))
    }
}

/// Trains a single layer at a rate budget: center, estimate the covariance,
/// decorrelate with its eigenbasis, pick the shared threshold by bisection,
/// and set the optimal magnitudes. The back-projection is fixed to `A^T`.
pub fn train_single_layer(data: &VectorSet, rate_budget: f64) -> Result<LayerParams> {
    TrainedBasis::estimate(data)?.layer_for_rate(rate_budget)
}

/// Trains a single layer at an explicit threshold (the natural
/// parameterization for rate-distortion sweeps).
pub fn train_single_layer_at(data: &VectorSet, lambda: f64) -> Result<LayerParams> {
    TrainedBasis::estimate(data)?.layer(lambda)
}

/// Trains a multi-layer model with one rate budget shared by all layers.
pub fn train_ml(data: &VectorSet, layer_rate: f64, num_layers: usize) -> Result<MLModel> {
    train_ml_schedule(data, &vec![layer_rate; num_layers])
}

/// Trains a multi-layer model with an explicit per-layer rate schedule.
///
/// Layer `l` is fitted to the residual left by layers `1..l` (covariance and
/// eigenbasis re-estimated on the residuals); the mean is subtracted at
/// layer 1 only. If the residual collapses to numerical zero early, the
/// model is returned with fewer layers and a warning is logged.
pub fn train_ml_schedule(data: &VectorSet, rates: &[f64]) -> Result<MLModel> {
    if rates.is_empty() {
        return Err(Error::Domain("rate schedule must not be empty".into()));
    }
    let mut resid = data.clone();
    let initial_energy = resid.mean_square();
    let mut layers: Vec<LayerParams> = Vec::with_capacity(rates.len());

    for (l, &rate) in rates.iter().enumerate() {
        if resid.mean_square() <= 1e-20 * initial_energy {
            log::warn!(
                "residual vanished after {} of {} layers; returning a shorter model",
                layers.len(),
                rates.len()
            );
            break;
        }
        let basis = if l == 0 {
            TrainedBasis::estimate(&resid)?
        } else {
            TrainedBasis::estimate_zero_mean(&resid)?
        };
        let layer = basis.layer_for_rate(rate)?;
        let codes = layer.encode_set(&resid, l as u32)?;
        let recon = layer.decode_set(&codes)?;
        resid.sub_assign(&recon)?;
        layers.push(layer);
    }
    MLModel::from_layers(layers)
}
