//! Sparse ternary codes for lossy vector compression.
//!
//! A vector is projected onto the eigenbasis of its training covariance,
//! thresholded coordinate-wise to `{-1, 0, +1}`, and re-weighted per
//! dimension for reconstruction; stacking such layers on the residuals
//! yields a codebook-free progressive codec. The crate bundles:
//!
//! - [`math`]: Q-function, ternary entropy, covariance, Jacobi `eigh`;
//! - [`quantizer`]: the thresholding operator and the analytic
//!   rate/distortion of a thresholded Gaussian coordinate;
//! - [`slb`]: reverse water-filling and the Shannon Lower Bound curve;
//! - [`codec`]: single- and multi-layer training, encode/decode, and model
//!   serialization;
//! - [`baselines`]: PCA hashing and Sim-Hash with pseudo-inverse decoding;
//! - [`data`]: seeded synthetic Gaussian sources plus idx/fvecs loaders;
//! - [`metrics`]: distortion and empirical code entropy measurement.
//!
//! Batch operations fan out with rayon when the default `parallel` feature
//! is enabled and fall back to sequential loops without it; either way the
//! results are bit-identical (reductions are chunked deterministically).

pub mod baselines;
pub mod codec;
pub mod data;
mod error;
pub mod math;
pub mod metrics;
pub mod model_io;
mod par;
pub mod quantizer;
pub mod slb;

pub use error::{Error, Result};
