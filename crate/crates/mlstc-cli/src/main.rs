//! `mlstc`: experiment runner for sparse-ternary-code compression.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mlstc::codec::{train_ml, train_single_layer, MLModel, TrainedBasis};
use mlstc::data;
use mlstc::model_io::{self, ModelFile};

use mlstc_cli::config::{ExperimentConfig, Method, SourceConfig};
use mlstc_cli::report;
use mlstc_cli::sweep;
use mlstc_cli::CliError;

#[derive(Parser)]
#[command(
    name = "mlstc",
    about = "Sparse ternary codes: rate-distortion experiments, theory curves, and model tooling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rate-distortion sweep and write CSV plus a JSON config sidecar.
    Sweep(SweepArgs),
    /// Emit the per-dimension allocation of a single ternary layer next to
    /// the water-filling optimum.
    AllocReport(AllocArgs),
    /// Emit the Shannon Lower Bound curve for a source's spectrum.
    Slb(SlbArgs),
    /// Train a model and persist it.
    Train(TrainArgs),
    /// Encode a data file with a trained model.
    Encode(EncodeArgs),
    /// Decode a code file back to vectors (written as fvecs).
    Decode(DecodeArgs),
    /// Print a summary of a persisted model.
    InspectModel(InspectArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Data source: iid | ar1 | idx | fvecs.
    #[arg(long)]
    source: Option<String>,
    /// Vector dimension (synthetic sources).
    #[arg(long, default_value_t = 500)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    train_count: usize,
    #[arg(long, default_value_t = 1_000)]
    test_count: usize,
    /// AR(1) correlation.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Seed for synthetic data generation.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// idx image file for the training split.
    #[arg(long)]
    train_images: Option<PathBuf>,
    /// idx image file for the evaluation split.
    #[arg(long)]
    test_images: Option<PathBuf>,
    /// fvecs file for the training split.
    #[arg(long)]
    fvecs_train: Option<PathBuf>,
    /// fvecs file for the evaluation split.
    #[arg(long)]
    fvecs_test: Option<PathBuf>,
    /// Swap which fvecs file trains and which evaluates.
    #[arg(long, default_value_t = false)]
    swap_split: bool,
    /// Cap on training vectors read from files.
    #[arg(long)]
    max_train: Option<usize>,
    /// Cap on evaluation vectors read from files.
    #[arg(long)]
    max_test: Option<usize>,
}

impl SourceArgs {
    fn to_config(&self) -> Result<SourceConfig, CliError> {
        let kind = self
            .source
            .as_deref()
            .ok_or_else(|| CliError::Config("no --source given (iid|ar1|idx|fvecs)".into()))?;
        match kind {
            "iid" | "ar1" => Ok(SourceConfig::Synthetic {
                kind: kind.to_string(),
                dim: self.dim,
                train_count: self.train_count,
                test_count: self.test_count,
                rho: if kind == "iid" { 0.0 } else { self.rho },
                seed: self.data_seed,
            }),
            "idx" => {
                let (train, test) = match (&self.train_images, &self.test_images) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => {
                        return Err(CliError::Config(
                            "idx source needs --train-images and --test-images".into(),
                        ))
                    }
                };
                Ok(SourceConfig::Idx {
                    train_images: train,
                    test_images: test,
                    max_train: self.max_train,
                    max_test: self.max_test,
                })
            }
            "fvecs" => {
                let (train, test) = match (&self.fvecs_train, &self.fvecs_test) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => {
                        return Err(CliError::Config(
                            "fvecs source needs --fvecs-train and --fvecs-test".into(),
                        ))
                    }
                };
                Ok(SourceConfig::Fvecs {
                    train,
                    test,
                    max_train: self.max_train,
                    max_test: self.max_test,
                    swap: self.swap_split,
                })
            }
            other => Err(CliError::Config(format!(
                "unknown source '{other}' (expected iid|ar1|idx|fvecs)"
            ))),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON experiment config; inline source/method flags are ignored if set.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    /// Methods to sweep.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Method::Stc])]
    methods: Vec<Method>,
    /// Rate grid in bits/dimension.
    #[arg(long, value_delimiter = ',')]
    rate_grid: Vec<f64>,
    /// Direct threshold grid for single-layer sweeps.
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Per-layer rate for ml-stc.
    #[arg(long, default_value_t = 0.25)]
    layer_rate: f64,
    /// Layer-count prefixes reported for ml-stc.
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    /// Seed for method-internal randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AllocArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Ternary threshold.
    #[arg(long)]
    lambda: f64,
    /// Water-filling distortion target; defaults to the layer's own mean
    /// distortion.
    #[arg(long)]
    target_distortion: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SlbArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    rate_grid: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum)]
    method: Method,
    /// Rate budget in bits/dimension (stc).
    #[arg(long)]
    rate: Option<f64>,
    /// Per-layer rate budget (ml-stc).
    #[arg(long, default_value_t = 0.25)]
    layer_rate: f64,
    /// Layer count (ml-stc).
    #[arg(long)]
    layers: Option<usize>,
    /// Code width in bits (pca-hash, lsh).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input vectors: an fvecs file or an idx image file (sniffed).
    #[arg(long)]
    input: PathBuf,
    /// Cap on input vectors.
    #[arg(long)]
    max: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    codes: PathBuf,
    /// Decode only the first L layers (ternary models).
    #[arg(long)]
    up_to: Option<usize>,
    /// Output fvecs path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(args) => {
            let config = match &args.config {
                Some(path) => ExperimentConfig::from_json_file(path)?,
                None => ExperimentConfig {
                    source: args.source.to_config()?,
                    methods: args.methods.clone(),
                    rate_grid: args.rate_grid.clone(),
                    lambda_grid: args.lambda_grid.clone(),
                    layer_rate: args.layer_rate,
                    layers: args.layers.clone(),
                    seed: args.seed,
                },
            };
            let points = sweep::run_sweep_to_files(&config, &args.out)?;
            println!("wrote {} rate-distortion points to {}", points.len(), args.out.display());
            Ok(())
        }
        Command::AllocReport(args) => {
            let spectrum = source_spectrum(&args.source)?;
            let csv =
                report::allocation_report_csv(&spectrum, args.lambda, args.target_distortion)?;
            write_text(&args.out, &csv)?;
            println!("wrote allocation report to {}", args.out.display());
            Ok(())
        }
        Command::Slb(args) => {
            let spectrum = source_spectrum(&args.source)?;
            let csv = report::slb_csv(&spectrum, &args.rate_grid)?;
            write_text(&args.out, &csv)?;
            println!("wrote SLB curve to {}", args.out.display());
            Ok(())
        }
        Command::Train(args) => {
            let dataset = args.source.to_config()?.load()?;
            let model = match args.method {
                Method::Stc => {
                    let rate = args
                        .rate
                        .ok_or_else(|| CliError::Config("stc training needs --rate".into()))?;
                    let layer = train_single_layer(&dataset.train, rate)?;
                    ModelFile::Stc(MLModel::from_layers(vec![layer])?)
                }
                Method::MlStc => {
                    let layers = args.layers.ok_or_else(|| {
                        CliError::Config("ml-stc training needs --layers".into())
                    })?;
                    ModelFile::Stc(train_ml(&dataset.train, args.layer_rate, layers)?)
                }
                Method::PcaHash => {
                    let bits = args.bits.ok_or_else(|| {
                        CliError::Config("pca-hash training needs --bits".into())
                    })?;
                    ModelFile::Pca(mlstc::baselines::train_pca_hash(&dataset.train, bits)?)
                }
                Method::Lsh => {
                    let bits = args
                        .bits
                        .ok_or_else(|| CliError::Config("lsh training needs --bits".into()))?;
                    ModelFile::Lsh(mlstc::baselines::train_lsh(&dataset.train, bits, args.seed)?)
                }
            };
            model_io::save_model(&args.out, &model)?;
            println!("wrote {} model to {}", model.kind(), args.out.display());
            Ok(())
        }
        Command::Encode(args) => {
            let model = model_io::load_model(&args.model)?;
            let input = load_vectors(&args.input, args.max)?;
            match &model {
                ModelFile::Stc(m) => {
                    let codes = m.encode_set(&input)?;
                    model_io::save_ternary_codes(&args.out, &codes)?;
                }
                ModelFile::Pca(m) => {
                    let codes = m.encode_set(&input)?;
                    model_io::save_binary_codes(&args.out, &codes)?;
                }
                ModelFile::Lsh(m) => {
                    let codes = m.encode_set(&input)?;
                    model_io::save_binary_codes(&args.out, &codes)?;
                }
            }
            println!("encoded {} vectors to {}", input.len(), args.out.display());
            Ok(())
        }
        Command::Decode(args) => {
            let model = model_io::load_model(&args.model)?;
            let recon = match &model {
                ModelFile::Stc(m) => {
                    let codes = model_io::load_ternary_codes(&args.codes)?;
                    m.decode_set(&codes, args.up_to)?
                }
                ModelFile::Pca(m) => {
                    reject_up_to(args.up_to)?;
                    m.decode_set(&model_io::load_binary_codes(&args.codes)?)?
                }
                ModelFile::Lsh(m) => {
                    reject_up_to(args.up_to)?;
                    m.decode_set(&model_io::load_binary_codes(&args.codes)?)?
                }
            };
            data::write_fvecs(&args.out, &recon)?;
            println!("decoded {} vectors to {}", recon.len(), args.out.display());
            Ok(())
        }
        Command::InspectModel(args) => {
            inspect(&args.model)?;
            Ok(())
        }
    }
}

fn reject_up_to(up_to: Option<usize>) -> Result<(), CliError> {
    if up_to.is_some() {
        return Err(CliError::Config(
            "--up-to applies only to ternary models".into(),
        ));
    }
    Ok(())
}

fn source_spectrum(args: &SourceArgs) -> Result<Vec<f64>, CliError> {
    let dataset = args.to_config()?.load()?;
    let basis = TrainedBasis::estimate(&dataset.train)?;
    Ok(basis.spectrum_sq())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Loads vectors from either container, sniffing the idx magic.
fn load_vectors(path: &Path, max: Option<usize>) -> Result<mlstc::math::VectorSet, CliError> {
    let mut head = [0u8; 4];
    {
        let mut f = File::open(path).map_err(|e| {
            CliError::Config(format!("cannot open {}: {e}", path.display()))
        })?;
        let _ = f.read(&mut head).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
    }
    if u32::from_be_bytes(head) == 0x0000_0803 {
        let set = data::load_idx_images(path)?;
        Ok(match max {
            Some(m) if m < set.len() => {
                let dim = set.dim();
                mlstc::math::VectorSet::from_columns(dim, set.as_slice()[..dim * m].to_vec())
                    .expect("prefix is rectangular")
            }
            _ => set,
        })
    } else {
        Ok(data::load_fvecs(path, max)?)
    }
}

fn inspect(path: &Path) -> Result<(), CliError> {
    match model_io::load_model(path)? {
        ModelFile::Stc(m) => {
            println!("kind: ml-stc");
            println!("dimension: {}", m.dim());
            println!("layers: {}", m.num_layers());
            for (l, layer) in m.layers().iter().enumerate() {
                println!(
                    "layer {}: lambda {:.6e}, rate {:.6} bits/dim, active dims {}",
                    l + 1,
                    layer.lambda(),
                    m.per_layer_rate()[l],
                    layer.beta().iter().filter(|&&b| b > 0.0).count()
                );
            }
            println!(
                "cumulative rate: {:.6} bits/dim",
                m.cumulative_rate(m.num_layers())
            );
        }
        ModelFile::Pca(m) => {
            println!("kind: pca-hash");
            println!("dimension: {}", m.dim());
            println!("bits: {}", m.bits());
            println!("rate: {:.6} bits/dim", m.rate());
        }
        ModelFile::Lsh(m) => {
            println!("kind: lsh");
            println!("dimension: {}", m.dim());
            println!("bits: {}", m.bits());
            println!("rate: {:.6} bits/dim", m.rate());
            println!("global beta: {:.6}", m.global_beta());
        }
    }
    Ok(())
}
