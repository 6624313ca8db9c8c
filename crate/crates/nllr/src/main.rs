//! Command-line front end: train and evaluate classifiers, verify gradients
//! against the finite-difference oracle, and generate synthetic datasets.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 gradient check failure.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nllr::data::{self, Dataset};
use nllr::error::{Error, Result};
use nllr::gradcheck;
use nllr::loss::{LossKind, ProbClampPolicy};
use nllr::metrics;
use nllr::network::{Layer, Model};
use nllr::plot;
use nllr::rng::{self, SplitMix64};
use nllr::tensor::Tensor;
use nllr::train::{self, MetricsRow, TrainConfig};

const STREAM_CHECK_BATCH: u64 = 7;

#[derive(Parser)]
#[command(
    name = "nllr",
    about = "Train small neural classifiers under interchangeable \
             classification losses, with seeded, reproducible runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and emit per-epoch metrics as CSV.
    Train(RunArgs),
    /// Train a model, then print the final train and test metrics.
    Eval(RunArgs),
    /// Compare analytic gradients against central finite differences.
    Gradcheck(GradcheckArgs),
    /// Generate a synthetic blob dataset and write it as an IDX pair.
    Synth(SynthArgs),
}

/// Blob dataset shape `C,N,D,S`: class count, total samples, feature
/// dimension, and center separation.
#[derive(Clone, Debug)]
struct BlobSpec {
    classes: usize,
    total: usize,
    dim: usize,
    separation: f64,
}

impl BlobSpec {
    fn per_class(&self) -> usize {
        self.total / self.classes
    }
}

impl FromStr for BlobSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err("expected C,N,D,S (classes, samples, dim, separation)".into());
        }
        let field = |i: usize, name: &str| -> std::result::Result<usize, String> {
            parts[i]
                .parse()
                .map_err(|_| format!("bad {name} value {:?}", parts[i]))
        };
        let spec = BlobSpec {
            classes: field(0, "class count")?,
            total: field(1, "sample count")?,
            dim: field(2, "dimension")?,
            separation: parts[3]
                .parse()
                .map_err(|_| format!("bad separation value {:?}", parts[3]))?,
        };
        if spec.classes < 2 {
            return Err("need at least 2 classes".into());
        }
        if spec.total == 0 || !spec.total.is_multiple_of(spec.classes) {
            return Err(format!(
                "sample count {} must be a positive multiple of the class count {}",
                spec.total, spec.classes
            ));
        }
        if spec.dim == 0 {
            return Err("dimension must be >= 1".into());
        }
        if !(spec.separation > 0.0 && spec.separation.is_finite()) {
            return Err("separation must be positive and finite".into());
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct DatasetArgs {
    /// IDX image file (used together with --mnist-labels)
    #[arg(long, value_name = "PATH")]
    mnist_images: Option<PathBuf>,
    /// IDX label file (used together with --mnist-images)
    #[arg(long, value_name = "PATH")]
    mnist_labels: Option<PathBuf>,
    /// CIFAR-10 binary batch file
    #[arg(long, value_name = "PATH")]
    cifar: Option<PathBuf>,
    /// Synthetic blobs: classes, total samples, dimension, separation
    #[arg(long, value_name = "C,N,D,S")]
    blobs: Option<BlobSpec>,
}

impl DatasetArgs {
    fn load(&self, seed: u64) -> Result<Dataset> {
        match (&self.mnist_images, &self.mnist_labels, &self.cifar, &self.blobs) {
            (Some(images), Some(labels), None, None) => data::load_idx(images, labels),
            (Some(_), None, None, None) | (None, Some(_), None, None) => {
                Err(Error::InvalidConfig(
                    "--mnist-images and --mnist-labels go together".into(),
                ))
            }
            (None, None, Some(path), None) => data::load_cifar10_bin(path),
            (None, None, None, Some(b)) => {
                data::synth_blobs(seed, b.classes, b.per_class(), b.dim, b.separation)
            }
            (None, None, None, None) => Err(Error::InvalidConfig(
                "choose a dataset source: --mnist-images/--mnist-labels, --cifar, or --blobs"
                    .into(),
            )),
            _ => Err(Error::InvalidConfig(
                "choose exactly one dataset source".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Arch {
    /// Dense net for flat samples, convolutional net for image samples
    Auto,
    /// Flatten, one 128-unit hidden layer, output layer
    Mlp,
    /// Two conv/pool blocks, then a dense output layer
    Cnn,
}

impl fmt::Display for Arch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arch::Auto => "auto",
            Arch::Mlp => "mlp",
            Arch::Cnn => "cnn",
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// Classification loss: ce, bce, or nllr
    #[arg(long, default_value = "ce")]
    loss: LossKind,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// SGD learning rate
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Seed for initialization, shuffling, dropout, and blob generation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability clamp epsilon
    #[arg(long, default_value_t = 1e-7)]
    epsilon: f64,
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Model architecture
    #[arg(long, value_enum, default_value_t = Arch::Auto)]
    arch: Arch,
    /// Metrics CSV output path (train streams to stdout when omitted)
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Training-curve SVG output path
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Check a single loss instead of all three
    #[arg(long)]
    loss: Option<LossKind>,
    /// Maximum accepted relative error
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability clamp epsilon
    #[arg(long, default_value_t = 1e-7)]
    epsilon: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Blob parameters: classes, total samples, dimension, separation
    #[arg(long, value_name = "C,N,D,S")]
    blobs: BlobSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the IDX image file
    #[arg(long, value_name = "PATH")]
    out_images: PathBuf,
    /// Output path for the IDX label file
    #[arg(long, value_name = "PATH")]
    out_labels: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { 0 } else { 1 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Gradcheck(args) => cmd_gradcheck(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Usage and configuration mistakes exit 1; everything else that can go
/// wrong (unreadable files, malformed datasets, shape faults) exits 2.
fn classify(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::ModelBuild { .. } => 1,
        _ => 2,
    }
}

fn train_config(args: &RunArgs) -> TrainConfig {
    TrainConfig {
        loss: args.loss,
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        seed: args.seed,
        clamp_epsilon: args.epsilon,
    }
}

fn build_mlp(sample_shape: &[usize], classes: usize) -> Result<Model> {
    let flat: usize = sample_shape.iter().product();
    let mut layers = Vec::new();
    if sample_shape.len() > 1 {
        layers.push(Layer::flatten());
    }
    layers.push(Layer::dense(flat, 128)?);
    layers.push(Layer::relu());
    layers.push(Layer::dense(128, classes)?);
    Model::new(sample_shape.to_vec(), layers)
}

/// Spatial extent after one 3x3 valid convolution and one 2x2 pool.
fn conv_block_dims(h: usize, w: usize) -> Option<(usize, usize)> {
    if h < 4 || w < 4 {
        return None;
    }
    Some(((h - 2) / 2, (w - 2) / 2))
}

fn build_cnn(sample_shape: &[usize], classes: usize) -> Result<Model> {
    let too_small = || {
        Error::InvalidConfig(format!(
            "samples of shape {sample_shape:?} are too small for the \
             two-block convolutional architecture"
        ))
    };
    let (channels, h, w) = (sample_shape[0], sample_shape[1], sample_shape[2]);
    let (h, w) = conv_block_dims(h, w).ok_or_else(too_small)?;
    let (h, w) = conv_block_dims(h, w).ok_or_else(too_small)?;
    Model::new(
        sample_shape.to_vec(),
        vec![
            Layer::conv2d(channels, 8, 3, 3)?,
            Layer::relu(),
            Layer::max_pool2d(2, 2)?,
            Layer::conv2d(8, 16, 3, 3)?,
            Layer::relu(),
            Layer::max_pool2d(2, 2)?,
            Layer::flatten(),
            Layer::dense(16 * h * w, classes)?,
        ],
    )
}

/// Resolve the architecture against the sample shape, reshaping rows-by
/// -columns image samples to single-channel images for the conv net.
fn apply_arch(
    arch: Arch,
    train_set: Dataset,
    test_set: Dataset,
) -> Result<(Dataset, Dataset, Model)> {
    let rank = train_set.sample_shape().len();
    let arch = match arch {
        Arch::Auto => {
            if rank == 1 {
                Arch::Mlp
            } else {
                Arch::Cnn
            }
        }
        a => a,
    };
    match arch {
        Arch::Mlp => {
            let model = build_mlp(train_set.sample_shape(), train_set.num_classes())?;
            Ok((train_set, test_set, model))
        }
        Arch::Cnn => {
            let (train_set, test_set) = match *train_set.sample_shape() {
                [h, w] => (
                    train_set.reshape_samples(vec![1, h, w])?,
                    test_set.reshape_samples(vec![1, h, w])?,
                ),
                [_, _, _] => (train_set, test_set),
                _ => {
                    return Err(Error::InvalidConfig(
                        "the convolutional architecture needs image-shaped samples".into(),
                    ))
                }
            };
            let model = build_cnn(train_set.sample_shape(), train_set.num_classes())?;
            Ok((train_set, test_set, model))
        }
        Arch::Auto => unreachable!(),
    }
}

/// Load the single dataset source and split off a deterministic holdout,
/// one sixth of the data, as the test set.
fn load_and_prepare(args: &RunArgs) -> Result<(Dataset, Dataset, Model)> {
    let full = args.dataset.load(args.seed)?;
    let test_count = (full.len() / 6).max(1);
    let (train_set, test_set) = full.split_holdout(test_count, args.seed)?;
    let (train_set, test_set, mut model) = apply_arch(args.arch, train_set, test_set)?;
    model.init_params(args.seed);
    Ok((train_set, test_set, model))
}

/// Run training, streaming CSV rows to `--csv` or, for the train
/// subcommand, to stdout. Rows are flushed as they complete so an
/// interrupted run keeps every finished epoch.
fn run_training(args: &RunArgs, stdout_csv: bool) -> Result<Vec<MetricsRow>> {
    let cfg = train_config(args);
    cfg.validate()?;
    let (train_set, test_set, mut model) = load_and_prepare(args)?;

    let mut sink: Option<Box<dyn Write>> = match (&args.csv, stdout_csv) {
        (Some(path), _) => Some(Box::new(fs::File::create(path)?)),
        (None, true) => Some(Box::new(std::io::stdout())),
        (None, false) => None,
    };
    if let Some(s) = sink.as_mut() {
        writeln!(s, "{}", metrics::CSV_HEADER)?;
        s.flush()?;
    }
    let rows = train::train_with(&mut model, &train_set, &test_set, &cfg, |row| {
        if let Some(s) = sink.as_mut() {
            s.write_all(metrics::csv_row(row).as_bytes())?;
            s.flush()?;
        }
        Ok(())
    })?;
    if let Some(path) = &args.svg {
        fs::write(path, plot::render_svg(&rows)?)?;
    }
    Ok(rows)
}

fn cmd_train(args: &RunArgs) -> Result<u8> {
    run_training(args, true)?;
    Ok(0)
}

fn cmd_eval(args: &RunArgs) -> Result<u8> {
    let rows = run_training(args, false)?;
    let last = rows.last().expect("validated config trains at least one epoch");
    println!("train_loss={:.6}", last.train_loss);
    println!("train_acc={:.6}", last.train_acc);
    println!("test_loss={:.6}", last.test_loss);
    println!("test_acc={:.6}", last.test_acc);
    Ok(0)
}

fn check_architectures() -> Result<Vec<(&'static str, Model)>> {
    Ok(vec![
        (
            "mlp",
            Model::new(
                vec![12],
                vec![
                    Layer::dense(12, 32)?,
                    Layer::relu(),
                    Layer::dense(32, 4)?,
                ],
            )?,
        ),
        (
            "conv",
            Model::new(
                vec![1, 8, 8],
                vec![
                    Layer::conv2d(1, 4, 3, 3)?,
                    Layer::relu(),
                    Layer::max_pool2d(2, 2)?,
                    Layer::flatten(),
                    Layer::dense(36, 4)?,
                ],
            )?,
        ),
    ])
}

fn cmd_gradcheck(args: &GradcheckArgs) -> Result<u8> {
    if !(args.tolerance > 0.0 && args.tolerance.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive and finite, got {}",
            args.tolerance
        )));
    }
    let policy = ProbClampPolicy::new(args.epsilon)?;
    let kinds: Vec<LossKind> = match args.loss {
        Some(kind) => vec![kind],
        None => LossKind::ALL.to_vec(),
    };

    let mut all_passed = true;
    for (name, mut model) in check_architectures()? {
        model.init_params(rng::derive(args.seed, STREAM_CHECK_BATCH));
        let feature_len: usize = model.input_shape().iter().product();
        let mut shape = vec![5];
        shape.extend_from_slice(model.input_shape());
        let mut stream = SplitMix64::new(rng::derive2(args.seed, STREAM_CHECK_BATCH, 1));
        let features = Tensor::new(
            shape,
            (0..5 * feature_len).map(|_| stream.next_normal()).collect(),
        )?;
        let labels = [0usize, 1, 2, 3, 0];

        for &kind in &kinds {
            let report = gradcheck::check_model(
                &mut model,
                &features,
                &labels,
                kind,
                policy,
                args.tolerance,
            )?;
            println!(
                "{kind} {name}: max_rel_error={:.3e} ({})",
                report.max_rel_error,
                if report.passed { "pass" } else { "FAIL" }
            );
            all_passed &= report.passed;
        }
    }
    Ok(if all_passed { 0 } else { 3 })
}

fn cmd_synth(args: &SynthArgs) -> Result<u8> {
    let b = &args.blobs;
    let ds = data::synth_blobs(args.seed, b.classes, b.per_class(), b.dim, b.separation)?;
    let as_images = ds.reshape_samples(vec![1, b.dim])?;
    data::write_idx(&as_images, &args.out_images, &args.out_labels)?;
    println!(
        "wrote {} samples ({} classes, dim {}) to {} and {}",
        ds.len(),
        b.classes,
        b.dim,
        args.out_images.display(),
        args.out_labels.display()
    );
    Ok(0)
}
