//! Rate-distortion sweeps over (method, rate) cells, with deterministic
//! CSV emission.

use std::path::Path;

use mlstc::baselines::{train_lsh_family, train_pca_hash};
use mlstc::codec::{train_ml, TrainedBasis};
use mlstc::data::Dataset;
use mlstc::metrics::{empirical_code_entropy, measure_distortion};
use mlstc::quantizer;

use crate::config::{ExperimentConfig, Method};
use crate::CliError;

/// One measured rate-distortion point with full provenance.
#[derive(Debug, Clone)]
pub struct RdPoint {
    pub method: &'static str,
    pub dataset: String,
    pub seed: u64,
    pub layers_used: usize,
    /// Analytic rate in bits/dimension (ternary entropy for STC methods,
    /// `k/n` for the dense binary baselines).
    pub rate: f64,
    /// Measured symbol entropy on the evaluation split (equals `rate` for
    /// the binary baselines by the dense-bit convention).
    pub rate_empirical: f64,
    pub distortion: f64,
    pub lambda_schedule: Vec<f64>,
}

pub const CSV_HEADER: &str =
    "method,dataset,seed,layers_used,rate_analytic,rate_empirical,distortion,lambda_schedule";

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

impl RdPoint {
    pub fn csv_row(&self) -> String {
        let schedule = self
            .lambda_schedule
            .iter()
            .map(|&l| fmt(l))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method,
            self.dataset,
            self.seed,
            self.layers_used,
            fmt(self.rate),
            fmt(self.rate_empirical),
            fmt(self.distortion),
            schedule
        )
    }
}

/// Runs every (method, rate) cell of the sweep: train on the train split,
/// measure distortion on the test split. Deterministic given the config.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<RdPoint>, CliError> {
    config.validate()?;
    let dataset = config.source.load()?;
    if dataset.test.is_empty() {
        return Err(CliError::Config(
            "sweep needs a non-empty test split".into(),
        ));
    }
    let mut points = Vec::new();
    for &method in &config.methods {
        let cells = match method {
            Method::Stc => sweep_stc(config, &dataset)?,
            Method::MlStc => sweep_ml(config, &dataset)?,
            Method::PcaHash => sweep_pca(config, &dataset)?,
            Method::Lsh => sweep_lsh(config, &dataset)?,
        };
        points.extend(cells);
    }
    // Deterministic emission order regardless of any cell-level parallelism.
    points.sort_by(|a, b| {
        a.method
            .cmp(b.method)
            .then(a.rate.total_cmp(&b.rate))
            .then(a.layers_used.cmp(&b.layers_used))
    });
    Ok(points)
}

fn sweep_stc(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<RdPoint>, CliError> {
    let basis = TrainedBasis::estimate(&dataset.train)?;
    let spectrum = basis.spectrum_sq();
    let lambdas: Vec<f64> = match &config.lambda_grid {
        Some(grid) => grid.clone(),
        None => config
            .rate_grid
            .iter()
            .map(|&r| quantizer::lambda_for_rate(&spectrum, r))
            .collect::<Result<_, _>>()?,
    };
    let mut out = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let layer = basis.layer(lambda)?;
        let codes = layer.encode_set(&dataset.test, 0)?;
        let recon = layer.decode_set(&codes)?;
        out.push(RdPoint {
            method: Method::Stc.label(),
            dataset: dataset.name.clone(),
            seed: config.seed,
            layers_used: 1,
            rate: layer.analytic_rate(),
            rate_empirical: empirical_code_entropy(&codes, layer.dim()),
            distortion: measure_distortion(&dataset.test, &recon)?,
            lambda_schedule: vec![lambda],
        });
    }
    Ok(out)
}

fn sweep_ml(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<RdPoint>, CliError> {
    let prefixes: Vec<usize> = match &config.layers {
        Some(layers) => layers.clone(),
        None => {
            // Enough layers to cover the largest requested rate.
            config
                .rate_grid
                .iter()
                .map(|&r| (r / config.layer_rate).round().max(1.0) as usize)
                .collect()
        }
    };
    let max_layers = prefixes.iter().copied().max().unwrap_or(1);
    let model = train_ml(&dataset.train, config.layer_rate, max_layers)?;
    let codes = model.encode_set(&dataset.test)?;

    let mut out = Vec::new();
    for &k in &prefixes {
        let k = k.min(model.num_layers());
        if k == 0 {
            continue;
        }
        let recon = model.decode_set(&codes, Some(k))?;
        let empirical: f64 = (0..k)
            .map(|l| {
                let layer_codes: Vec<_> = codes.iter().map(|stack| stack[l].clone()).collect();
                empirical_code_entropy(&layer_codes, model.dim())
            })
            .sum();
        out.push(RdPoint {
            method: Method::MlStc.label(),
            dataset: dataset.name.clone(),
            seed: config.seed,
            layers_used: k,
            rate: model.cumulative_rate(k),
            rate_empirical: empirical,
            distortion: measure_distortion(&dataset.test, &recon)?,
            lambda_schedule: model.layers()[..k].iter().map(|l| l.lambda()).collect(),
        });
    }
    Ok(out)
}

fn bits_for_rate(rate: f64, dim: usize) -> usize {
    ((rate * dim as f64).ceil() as usize).max(1)
}

fn sweep_pca(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<RdPoint>, CliError> {
    let n = dataset.dim();
    let ks: Vec<usize> = config
        .rate_grid
        .iter()
        .map(|&r| bits_for_rate(r, n).min(n))
        .collect();
    let widest = ks.iter().copied().max().unwrap_or(0);
    let full = train_pca_hash(&dataset.train, widest)?;
    let mut out = Vec::new();
    for &k in &ks {
        let model = full.truncated(k)?;
        let codes = model.encode_set(&dataset.test)?;
        let recon = model.decode_set(&codes)?;
        out.push(RdPoint {
            method: Method::PcaHash.label(),
            dataset: dataset.name.clone(),
            seed: config.seed,
            layers_used: 1,
            rate: model.rate(),
            rate_empirical: model.rate(),
            distortion: measure_distortion(&dataset.test, &recon)?,
            lambda_schedule: Vec::new(),
        });
    }
    Ok(out)
}

fn sweep_lsh(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<RdPoint>, CliError> {
    let n = dataset.dim();
    let ks: Vec<usize> = config
        .rate_grid
        .iter()
        .map(|&r| bits_for_rate(r, n))
        .collect();
    // One seeded projector family shared across widths.
    let models = train_lsh_family(&dataset.train, &ks, config.seed)?;
    let mut out = Vec::new();
    for model in models {
        let codes = model.encode_set(&dataset.test)?;
        let recon = model.decode_set(&codes)?;
        out.push(RdPoint {
            method: Method::Lsh.label(),
            dataset: dataset.name.clone(),
            seed: config.seed,
            layers_used: 1,
            rate: model.rate(),
            rate_empirical: model.rate(),
            distortion: measure_distortion(&dataset.test, &recon)?,
            lambda_schedule: Vec::new(),
        });
    }
    Ok(out)
}

/// Renders points as CSV text (LF line endings, fixed float formatting), so
/// identical sweeps produce byte-identical files.
pub fn to_csv(points: &[RdPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

/// Writes the CSV and a JSON sidecar holding the full config.
pub fn write_outputs(
    points: &[RdPoint],
    config: &ExperimentConfig,
    out: &Path,
) -> Result<(), CliError> {
    std::fs::write(out, to_csv(points))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", out.display())))?;
    let sidecar = out.with_extension("config.json");
    let json = serde_json::to_string_pretty(config)
        .map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
    std::fs::write(&sidecar, json)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", sidecar.display())))?;
    Ok(())
}

/// Convenience entry point: run and persist in one call.
pub fn run_sweep_to_files(
    config: &ExperimentConfig,
    out: &Path,
) -> Result<Vec<RdPoint>, CliError> {
    let points = run_sweep(config)?;
    write_outputs(&points, config, out)?;
    Ok(points)
}
