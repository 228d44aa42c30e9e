//! Deterministic scalar and matrix primitives shared by every other module:
//! the Gaussian Q-function, ternary entropy, covariance estimation, and a
//! cyclic-Jacobi symmetric eigensolver.
//!
//! Everything here is a pure function over immutable inputs and safe to call
//! concurrently; `eigh` itself is single-threaded so callers may parallelize
//! across independent matrices.

mod chol;
mod eigh;
mod mat;
mod special;

pub use chol::{solve_spd, solve_spd_ridged};
pub use eigh::{eigh, SymmetricSpectrum};
pub use mat::{
    axpy, column_mean, covariance_about, cross_gram, dot, estimate_covariance, Mat, VectorSet,
};
pub use special::{erfc, q_function, ternary_entropy};

pub(crate) use special::{ht, q};

/// Eigenvalues smaller than `RANK_TOL * max_eigenvalue` are treated as
/// exactly zero downstream; those coordinates are never coded.
pub const RANK_TOL: f64 = 1e-12;

/// Clamps a sorted eigenvalue spectrum: entries below `RANK_TOL` times the
/// largest are zeroed.
pub fn clamp_spectrum(eigenvalues: &mut [f64]) {
    let max = eigenvalues.first().copied().unwrap_or(0.0);
    let floor = RANK_TOL * max;
    for v in eigenvalues.iter_mut() {
        if *v < floor {
            *v = 0.0;
        }
    }
}
