//! Seeded synthetic Gaussian sources: i.i.d. and first-order autoregressive
//! columns with unit marginal variance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math::VectorSet;

/// Kind of synthetic source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    /// Independent standard normal coordinates.
    Iid,
    /// AR(1) within each column: `cov(x_i, x_j) = rho^|i-j|`.
    Ar1,
}

/// Parameters of a synthetic Gaussian database.
///
/// Generation is driven by ChaCha8, a counter-based stream cipher RNG, so a
/// seed reproduces the same matrices on every platform. The test split is
/// drawn from the same stream immediately after the training columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SourceKind,
    /// Vector dimension.
    pub dim: usize,
    /// Training columns.
    pub train_count: usize,
    /// Held-out columns.
    pub test_count: usize,
    /// AR(1) correlation in `[0, 1)`; ignored for i.i.d. sources.
    pub rho: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn iid(dim: usize, train_count: usize, test_count: usize, seed: u64) -> Self {
        SyntheticSpec {
            kind: SourceKind::Iid,
            dim,
            train_count,
            test_count,
            rho: 0.0,
            seed,
        }
    }

    pub fn ar1(dim: usize, train_count: usize, test_count: usize, rho: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SourceKind::Ar1,
            dim,
            train_count,
            test_count,
            rho,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.train_count == 0 {
            return Err(Error::Domain(
                "synthetic source needs dim >= 1 and at least one training column".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Domain(format!(
                "AR(1) correlation must lie in [0, 1), got {}",
                self.rho
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.kind {
            SourceKind::Iid => format!("iid-n{}", self.dim),
            SourceKind::Ar1 => format!("ar1-rho{}-n{}", self.rho, self.dim),
        }
    }
}

/// A train/test pair sharing a dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub train: VectorSet,
    pub test: VectorSet,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.train.dim()
    }
}

/// Draws the train and test matrices for a spec; deterministic in the seed.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let train = draw(spec, spec.train_count, &mut rng);
    let test = draw(spec, spec.test_count, &mut rng);
    Ok(Dataset {
        name: spec.label(),
        train,
        test,
    })
}

fn draw(spec: &SyntheticSpec, count: usize, rng: &mut ChaCha8Rng) -> VectorSet {
    let n = spec.dim;
    let mut data = Vec::with_capacity(n * count);
    match spec.kind {
        SourceKind::Iid => {
            for _ in 0..n * count {
                data.push(rng.sample::<f64, _>(StandardNormal));
            }
        }
        SourceKind::Ar1 => {
            // x_1 ~ N(0,1), x_t = rho x_{t-1} + sqrt(1 - rho^2) eps_t keeps
            // every coordinate at unit marginal variance.
            let rho = spec.rho;
            let innov = (1.0 - rho * rho).sqrt();
            for _ in 0..count {
                let mut prev: f64 = rng.sample(StandardNormal);
                data.push(prev);
                for _ in 1..n {
                    let eps: f64 = rng.sample(StandardNormal);
                    prev = rho * prev + innov * eps;
                    data.push(prev);
                }
            }
        }
    }
    VectorSet::from_columns(n, data).expect("generated buffer is rectangular")
}
