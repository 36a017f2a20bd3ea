//! `mcsda` command line: synthesize data, train, evaluate and benchmark.
//!
//! Exit codes: 0 success, 1 runtime or numerical failure, 2 usage error.
//! Log verbosity follows the `MCSDA_LOG` environment variable
//! (`error`, `warn`, `info`, `debug`).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    load_dataset, save_dataset, stratified_split, synth_generate, LabeledDataset, SynthSpec,
};
use crate::discriminant::{
    fit_class_model, fit_csda, fit_lda, fit_mcsda, fit_mda, parameter_count, DiscriminantModel,
    Init, Method, TrainConfig,
};
use crate::error::Error;
use crate::evaluation::{classify, verify, EvalReport, Task, REPORT_VERSION};
use crate::model_io::{is_model_dir, load_model, save_model, FitReportDoc};

pub const LOG_ENV: &str = "MCSDA_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "mcsda",
    version,
    about = "Multilinear class-specific discriminant analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic labeled tensor dataset.
    Synth(SynthArgs),
    /// Train one class-specific model, one per class, or a multi-class model.
    Train(TrainArgs),
    /// Score a dataset with trained models and write a JSON metric report.
    Eval(EvalArgs),
    /// Time CSDA against MCSDA on identical synthetic data.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Tensor dims, e.g. 8x6.
    #[arg(long)]
    pub dims: String,
    #[arg(long)]
    pub classes: usize,
    #[arg(long = "per-class")]
    pub per_class: usize,
    #[arg(long = "mean-scale", default_value_t = 10.0)]
    pub mean_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Replace an existing dataset.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Lda,
    Csda,
    Mda,
    Mcsda,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lda => Method::Lda,
            MethodArg::Csda => Method::Csda,
            MethodArg::Mda => Method::Mda,
            MethodArg::Mcsda => Method::Mcsda,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Ones,
    IdentitySlice,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Use a stratified split: train on this fraction, evaluate on the rest.
    #[arg(long)]
    pub split: Option<f64>,
    #[arg(long = "split-seed", default_value_t = 0)]
    pub split_seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Subspace dims: `AxB...` for tensor methods, a scalar for lda/csda.
    #[arg(long)]
    pub dims: String,
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long = "max-iter", default_value_t = 20)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub eps: f64,
    #[arg(long = "positive-class", conflicts_with = "one_vs_rest")]
    pub positive_class: Option<usize>,
    #[arg(long = "one-vs-rest")]
    pub one_vs_rest: bool,
    #[arg(long, value_enum, default_value = "ones")]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Comma-separated model directories, or directories holding them.
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Verify,
    Classify,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "40x30")]
    pub dims: String,
    #[arg(long, default_value = "7x7")]
    pub subspace: String,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    #[arg(long = "max-iter", default_value_t = 20)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the timings as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `AxBxC` into positive integers.
pub fn parse_dims(text: &str) -> Result<Vec<usize>, CliError> {
    let dims = text
        .split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("cannot parse dims {text:?}; expected e.g. 8x6")))?;
    if dims.contains(&0) {
        return Err(usage(format!("dims {text:?} contain a zero")));
    }
    Ok(dims)
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a).map(|_| ()),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        dims: parse_dims(&args.dims)?,
        n_classes: args.classes,
        samples_per_class: args.per_class,
        class_mean_scale: args.mean_scale,
        noise_sigma: args.sigma,
        seed: args.seed,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let data = synth_generate(&spec)?;
    save_dataset(&data, &args.out, args.force)?;
    println!(
        "wrote {}: {} samples, dims {}, {} classes",
        args.out.display(),
        data.len(),
        format_dims(data.dims()),
        data.n_classes()
    );
    Ok(())
}

fn format_dims(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn load_split(
    path: &Path,
    split: &SplitArgs,
    train_side: bool,
) -> Result<LabeledDataset, CliError> {
    let data = load_dataset(path)?;
    match split.split {
        None => Ok(data),
        Some(f) if !(f > 0.0 && f < 1.0) => Err(usage(format!("--split {f} not in (0, 1)"))),
        Some(f) => {
            let (train, test) = stratified_split(&data, f, split.split_seed)?;
            Ok(if train_side { train } else { test })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedEntry {
    pub dir: String,
    pub positive_class: Option<usize>,
    pub fit_report: FitReportDoc,
}

/// `fit_report.json` written next to the model directories.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub version: u32,
    pub method: Method,
    pub input_dims: Vec<usize>,
    pub subspace_dims: Vec<usize>,
    pub lambda: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub models: Vec<TrainedEntry>,
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let method: Method = args.method.into();
    let dims_text = args.dims.trim();
    if method.is_vector() && dims_text.contains(['x', 'X']) {
        return Err(usage(format!(
            "{} is a vector method and takes a scalar --dims, got {dims_text:?}",
            method.name()
        )));
    }
    let subspace = parse_dims(dims_text)?;
    if method.is_class_specific() && args.positive_class.is_none() && !args.one_vs_rest {
        return Err(usage(format!(
            "{} needs --positive-class ID or --one-vs-rest",
            method.name()
        )));
    }
    let config = TrainConfig {
        lambda: args.lambda,
        max_iter: args.max_iter,
        eps: args.eps,
        subspace_dims: subspace,
        init: match args.init {
            InitArg::Ones => Init::Ones,
            InitArg::IdentitySlice => Init::IdentitySlice,
        },
        seed: args.seed,
    };
    if config.lambda.is_nan()
        || config.lambda < 0.0
        || config.max_iter == 0
        || config.eps.is_nan()
        || config.eps <= 0.0
    {
        return Err(usage(
            "--lambda must be >= 0, --max-iter >= 1 and --eps > 0",
        ));
    }
    let data = load_split(&args.data, &args.split, true)?;
    if let Some(p) = args.positive_class {
        if p == 0 || p > data.n_classes() {
            return Err(usage(format!(
                "--positive-class {p} outside 1..={}",
                data.n_classes()
            )));
        }
    }

    let trained: Vec<(String, DiscriminantModel)> = if args.one_vs_rest {
        let models = (1..=data.n_classes())
            .into_par_iter()
            .map(|c| fit_class_model(method, &data, c, &config))
            .collect::<Result<Vec<_>, _>>()?;
        models
            .into_iter()
            .map(|m| (format!("class_{}", m.positive_class.unwrap_or(0)), m))
            .collect()
    } else if let Some(p) = args.positive_class {
        vec![(
            format!("class_{p}"),
            fit_class_model(method, &data, p, &config)?,
        )]
    } else {
        let model = match method {
            Method::Lda => fit_lda(&data, &config)?,
            Method::Mda => fit_mda(&data, &config)?,
            Method::Csda => unreachable!("checked above"),
            Method::Mcsda => unreachable!("checked above"),
        };
        vec![("multiclass".to_string(), model)]
    };

    fs::create_dir_all(&args.out)?;
    let mut entries = Vec::with_capacity(trained.len());
    for (name, model) in &trained {
        save_model(model, args.out.join(name), args.force)?;
        let r = &model.fit_report;
        println!(
            "{name}: {} sweeps, converged {}, objective {:.6e}, {} parameters",
            r.iterations_run,
            r.converged,
            r.objective_trace.last().copied().unwrap_or(f64::NAN),
            r.parameter_count
        );
        entries.push(TrainedEntry {
            dir: name.clone(),
            positive_class: model.positive_class,
            fit_report: r.into(),
        });
    }
    let report = TrainReport {
        version: 1,
        method,
        input_dims: data.dims().to_vec(),
        subspace_dims: config.subspace_dims.clone(),
        lambda: config.lambda,
        max_iter: config.max_iter,
        eps: config.eps,
        models: entries,
    };
    fs::write(
        args.out.join("fit_report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    Ok(())
}

/// Expands each path into model directories: a model directory itself, or
/// every model directory directly inside it (sorted by name).
pub fn collect_models(paths: &[PathBuf]) -> Result<Vec<DiscriminantModel>, CliError> {
    let mut models = Vec::new();
    for path in paths {
        if is_model_dir(path) {
            models.push(load_model(path)?);
            continue;
        }
        let mut children: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|_| CliError::Runtime(Error::MissingFile(path.clone())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| is_model_dir(p))
            .collect();
        if children.is_empty() {
            return Err(CliError::Runtime(Error::MissingFile(
                path.join("model.json"),
            )));
        }
        children.sort();
        for c in children {
            models.push(load_model(c)?);
        }
    }
    // deterministic order regardless of directory naming
    models.sort_by_key(|m| m.positive_class.unwrap_or(usize::MAX));
    Ok(models)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let models = collect_models(&args.models)?;
    let data = load_split(&args.data, &args.split, false)?;
    for m in &models {
        if m.input_dims != data.dims() {
            return Err(CliError::Runtime(Error::InvalidArgument(format!(
                "model input dims {} do not match data dims {}",
                format_dims(&m.input_dims),
                format_dims(data.dims())
            ))));
        }
    }
    let report = match args.task {
        TaskArg::Verify => {
            let v = verify(&models, &data)?;
            for m in &v.per_model {
                println!("class {}: AP {:.6}", m.positive_class, m.ap);
            }
            println!("mAP {:.6}", v.map);
            EvalReport {
                version: REPORT_VERSION,
                task: Task::Verify,
                verification: Some(v),
                classification: None,
            }
        }
        TaskArg::Classify => {
            let c = classify(&models, &data)?;
            println!(
                "accuracy {:.6}, macro precision {:.6}, macro recall {:.6}, macro F1 {:.6}",
                c.accuracy, c.macro_precision, c.macro_recall, c.macro_f1
            );
            EvalReport {
                version: REPORT_VERSION,
                task: Task::Classify,
                verification: None,
                classification: Some(c),
            }
        }
    };
    if let Some(parent) = args.report.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&args.report, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dims: Vec<usize>,
    pub subspace: Vec<usize>,
    pub n: usize,
    pub repeats: usize,
    pub csda_seconds: Vec<f64>,
    pub mcsda_seconds: Vec<f64>,
    pub mcsda_sweeps: Vec<usize>,
    /// Mean CSDA time over mean MCSDA time (MCSDA normalized to 1).
    pub time_ratio: f64,
    /// Ratio of the leading cost terms of the two solvers.
    pub predicted_ratio: f64,
    pub csda_parameters: usize,
    pub mcsda_parameters: usize,
}

/// Leading-term cost ratio: `N I^2 + 6.5 I^3` for the vector solver over
/// `tau (N I sum_k I'_k + 6.5 sum_k I_k^3)` for the tensor solver.
pub fn predicted_cost_ratio(dims: &[usize], subspace: &[usize], n: usize, max_iter: usize) -> f64 {
    let total: f64 = dims.iter().map(|&d| d as f64).product();
    let n = n as f64;
    let tau = max_iter as f64;
    let vector = n * total * total + 6.5 * total.powi(3);
    let reduced: f64 = subspace.iter().map(|&d| d as f64).sum();
    let cubes: f64 = dims.iter().map(|&d| (d as f64).powi(3)).sum();
    let tensor = tau * n * total * reduced + 6.5 * tau * cubes;
    vector / tensor
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    let dims = parse_dims(&args.dims)?;
    let subspace = parse_dims(&args.subspace)?;
    if dims.len() != subspace.len() || subspace.iter().zip(&dims).any(|(s, d)| s > d) {
        return Err(usage(
            "--subspace must have one dim per mode, each <= the input dim",
        ));
    }
    if args.repeats == 0 || args.classes < 2 || args.n < 2 * args.classes {
        return Err(usage(
            "need --repeats >= 1, --classes >= 2 and --n >= 2 * classes",
        ));
    }
    let data = synth_generate(&SynthSpec {
        dims: dims.clone(),
        n_classes: args.classes,
        samples_per_class: args.n / args.classes,
        class_mean_scale: 10.0,
        noise_sigma: 1.0,
        seed: args.seed,
    })?;
    let d: usize = subspace.iter().product();
    let vector_config = TrainConfig {
        lambda: args.lambda,
        max_iter: args.max_iter,
        ..TrainConfig::new(vec![d])
    };
    let tensor_config = TrainConfig {
        lambda: args.lambda,
        max_iter: args.max_iter,
        ..TrainConfig::new(subspace.clone())
    };
    let mut csda_seconds = Vec::new();
    let mut mcsda_seconds = Vec::new();
    let mut mcsda_sweeps = Vec::new();
    for r in 0..args.repeats {
        let start = Instant::now();
        fit_csda(&data, 1, &vector_config)?;
        csda_seconds.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        let m = fit_mcsda(&data, 1, &tensor_config)?;
        mcsda_seconds.push(start.elapsed().as_secs_f64());
        mcsda_sweeps.push(m.fit_report.iterations_run);
        log::info!(
            "repeat {r}: csda {:.4}s, mcsda {:.4}s",
            csda_seconds[r],
            mcsda_seconds[r]
        );
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let report = BenchReport {
        time_ratio: mean(&csda_seconds) / mean(&mcsda_seconds),
        predicted_ratio: predicted_cost_ratio(&dims, &subspace, data.len(), args.max_iter),
        csda_parameters: parameter_count(Method::Csda, &dims, &subspace),
        mcsda_parameters: parameter_count(Method::Mcsda, &dims, &subspace),
        dims,
        subspace,
        n: data.len(),
        repeats: args.repeats,
        csda_seconds,
        mcsda_seconds,
        mcsda_sweeps,
    };
    Ok(report)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    let report = run_bench(args)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "dims {} -> {}, N = {}, {} repeats",
        format_dims(&report.dims),
        format_dims(&report.subspace),
        report.n,
        report.repeats
    );
    println!(
        "csda  {:.4}s  ({} parameters)",
        mean(&report.csda_seconds),
        report.csda_parameters
    );
    println!(
        "mcsda {:.4}s  ({} parameters, sweeps {:?})",
        mean(&report.mcsda_seconds),
        report.mcsda_parameters,
        report.mcsda_sweeps
    );
    println!(
        "relative time (mcsda = 1): csda {:.2}; leading-term cost ratio {:.2}",
        report.time_ratio, report.predicted_ratio
    );
    if let Some(path) = &args.report {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report)
}
