//! Experiment configuration: data sources, method lists, and rate grids.
//! Loadable from JSON and buildable from command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use mlstc::data::{self, Dataset, SourceKind, SyntheticSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Single-layer sparse ternary codes.
    Stc,
    /// Multi-layer residual sparse ternary codes.
    MlStc,
    /// PCA hashing with per-dimension re-weighting.
    PcaHash,
    /// Random-projection sign hashing with a learned pseudo-inverse decoder.
    Lsh,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Stc => "stc",
            Method::MlStc => "ml-stc",
            Method::PcaHash => "pca-hash",
            Method::Lsh => "lsh",
        }
    }
}

/// Where the train/test matrices come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SourceConfig {
    Synthetic {
        kind: String,
        dim: usize,
        train_count: usize,
        test_count: usize,
        #[serde(default)]
        rho: f64,
        #[serde(default)]
        seed: u64,
    },
    Idx {
        train_images: PathBuf,
        test_images: PathBuf,
        #[serde(default)]
        max_train: Option<usize>,
        #[serde(default)]
        max_test: Option<usize>,
    },
    Fvecs {
        train: PathBuf,
        test: PathBuf,
        #[serde(default)]
        max_train: Option<usize>,
        #[serde(default)]
        max_test: Option<usize>,
        /// Swap the roles of the two files (which file trains is a matter
        /// of convention for the descriptor corpora).
        #[serde(default)]
        swap: bool,
    },
}

impl SourceConfig {
    pub fn load(&self) -> Result<Dataset, CliError> {
        match self {
            SourceConfig::Synthetic {
                kind,
                dim,
                train_count,
                test_count,
                rho,
                seed,
            } => {
                let kind = match kind.as_str() {
                    "iid" => SourceKind::Iid,
                    "ar1" => SourceKind::Ar1,
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown synthetic kind '{other}' (expected iid or ar1)"
                        )))
                    }
                };
                let spec = SyntheticSpec {
                    kind,
                    dim: *dim,
                    train_count: *train_count,
                    test_count: *test_count,
                    rho: *rho,
                    seed: *seed,
                };
                Ok(data::generate(&spec)?)
            }
            SourceConfig::Idx {
                train_images,
                test_images,
                max_train,
                max_test,
            } => {
                let train = truncate(data::load_idx_images(train_images)?, *max_train);
                let test = truncate(data::load_idx_images(test_images)?, *max_test);
                let name = stem(train_images);
                Ok(Dataset { name, train, test })
            }
            SourceConfig::Fvecs {
                train,
                test,
                max_train,
                max_test,
                swap,
            } => {
                let (train_path, test_path) = if *swap { (test, train) } else { (train, test) };
                let train_set = data::load_fvecs(train_path, *max_train)?;
                let test_set = data::load_fvecs(test_path, *max_test)?;
                if train_set.dim() != test_set.dim() {
                    return Err(CliError::Config(format!(
                        "train dimension {} does not match test dimension {}",
                        train_set.dim(),
                        test_set.dim()
                    )));
                }
                Ok(Dataset {
                    name: stem(train_path),
                    train: train_set,
                    test: test_set,
                })
            }
        }
    }
}

fn truncate(set: mlstc::math::VectorSet, max: Option<usize>) -> mlstc::math::VectorSet {
    match max {
        Some(m) if m < set.len() => {
            let dim = set.dim();
            let data = set.as_slice()[..dim * m].to_vec();
            mlstc::math::VectorSet::from_columns(dim, data).expect("prefix is rectangular")
        }
        _ => set,
    }
}

fn stem(path: &PathBuf) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Full sweep description; the JSON sidecar written next to every result
/// file is exactly this structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: SourceConfig,
    pub methods: Vec<Method>,
    /// Rate grid in bits/dimension, used by every method.
    #[serde(default)]
    pub rate_grid: Vec<f64>,
    /// Optional direct threshold grid for single-layer sweeps (overrides
    /// the rate grid for the `stc` method).
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    /// Per-layer rate budget for `ml-stc`.
    #[serde(default = "default_layer_rate")]
    pub layer_rate: f64,
    /// Layer-count prefixes to report for `ml-stc`; derived from the rate
    /// grid when absent.
    #[serde(default)]
    pub layers: Option<Vec<usize>>,
    /// Seed for method-internal randomness (the LSH projectors).
    #[serde(default)]
    pub seed: u64,
}

fn default_layer_rate() -> f64 {
    0.25
}

impl ExperimentConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Config("no methods requested".into()));
        }
        let has_rates = !self.rate_grid.is_empty()
            || self
                .lambda_grid
                .as_ref()
                .is_some_and(|g| !g.is_empty() && self.methods == [Method::Stc]);
        let rateless_ok = self.methods == [Method::MlStc]
            && self.layers.as_ref().is_some_and(|l| !l.is_empty());
        if !has_rates && !rateless_ok {
            return Err(CliError::Config("no rate points requested".into()));
        }
        if self.rate_grid.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(CliError::Config("rates must be positive and finite".into()));
        }
        if let Some(grid) = &self.lambda_grid {
            if grid.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
                return Err(CliError::Config("lambda grid must be non-negative".into()));
            }
        }
        if !(self.layer_rate > 0.0) {
            return Err(CliError::Config("layer rate must be positive".into()));
        }
        Ok(())
    }
}
