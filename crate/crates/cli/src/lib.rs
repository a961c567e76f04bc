//! The `covboost` command-line pipeline.
//!
//! Every command writes its outputs plus a JSON run manifest next to them.
//! Exit codes: 2 for command-line and config-file errors, 3 when an input
//! violates a contract (bad data, schema mismatch, unreachable target), 4 for
//! I/O failures.

pub mod svg;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{ArgAction, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use covboost::dataset::{
    asymptomatic_negatives, load_csv, reporter_positive_rate, simulate_bias, split, synthesize, write_csv,
    BiasSimConfig, TableCounts,
};
use covboost::gbm::{fit, load_model, save_model};
use covboost::metrics::{
    aupr, auroc, bootstrap_ci, pr_curve, roc_band, roc_curve, threshold_for_sensitivity, threshold_for_specificity,
    threshold_table, ThresholdReport,
};
use covboost::rng::derive_seed;
use covboost::scalar::fmt_real;
use covboost::shap::TreeExplainer;
use covboost::{Dataset, DatasetError, Feature, GbmError, MarginalTable, Metric, MetricsError, Model, ScoredLabels};
use covboost::{ShapError, TrainConfig};

use svg::{CurveKind, SwarmPoint};

pub const ROC_BAND_POINTS: usize = 101;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Contract(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Contract(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match &e {
            DatasetError::Csv(c) if c.is_io_error() => CliError::Io(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }
}

impl From<GbmError> for CliError {
    fn from(e: GbmError) -> Self {
        match e {
            GbmError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl From<ShapError> for CliError {
    fn from(e: ShapError) -> Self {
        CliError::Contract(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        io_err(path, e)
    } else {
        CliError::Contract(format!("{}: {e}", path.display()))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "covboost",
    version,
    about = "Gradient-boosted trees on eight binary symptom features"
)]
pub struct Cli {
    /// File of `key=value` lines supplying flag values; command-line flags win
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel steps (outputs do not depend on it)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a synthetic dataset from class-conditional feature rates
    Synth(SynthArgs),
    /// Split a dataset into train and test parts
    Split(SplitArgs),
    /// Fit a boosted model
    Train(TrainArgs),
    /// Score records with a model
    Predict(PredictArgs),
    /// Per-record SHAP attributions
    Explain(PredictArgs),
    /// ROC/PR curves, threshold table and bootstrap intervals
    Evaluate(EvaluateArgs),
    /// Drop asymptomatic negatives and compare reporter positive rates
    SimulateBias(SimulateBiasArgs),
    /// Render an SVG plot from evaluate/explain outputs
    Plot(PlotArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Split(_) => "split",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Explain(_) => "explain",
            Command::Evaluate(_) => "evaluate",
            Command::SimulateBias(_) => "simulate-bias",
            Command::Plot(_) => "plot",
        }
    }
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub n_pos: usize,
    #[arg(long)]
    pub n_neg: usize,
    #[arg(long)]
    pub seed: u64,
    /// Counts CSV laid out like the bundled table (default: the bundled table)
    #[arg(long)]
    pub marginals: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct SplitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out_train: PathBuf,
    #[arg(long)]
    pub out_test: PathBuf,
    /// Share of records assigned to the test part
    #[arg(long, default_value_t = 0.5)]
    pub test_fraction: f64,
    /// Split each class separately so both parts keep the prevalence
    #[arg(long)]
    pub stratified: bool,
    #[arg(long)]
    pub seed: u64,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out_model: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub num_rounds: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 16)]
    pub max_leaves: usize,
    #[arg(long, default_value_t = 20)]
    pub min_samples_leaf: usize,
    #[arg(long, default_value_t = 1.0)]
    pub l2_lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub min_split_gain: f64,
    /// Recorded in the model; training itself draws no random numbers
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Prepended to every output file name, e.g. `out/test_`
    #[arg(long)]
    pub out_prefix: String,
    /// Bootstrap resamples for intervals and the ROC band; 0 disables
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Required when --bootstrap is nonzero
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated sensitivity targets for operating points
    #[arg(long)]
    pub target_sensitivity: Option<String>,
    /// Comma-separated specificity targets for operating points
    #[arg(long)]
    pub target_specificity: Option<String>,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct SimulateBiasArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated shares of asymptomatic negatives to drop
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub fractions: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Roc,
    Pr,
    Beeswarm,
}

#[derive(clap::Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// roc.csv / pr.csv from evaluate, or the explain CSV for beeswarm
    #[arg(long = "in")]
    pub input: PathBuf,
    /// roc_band.csv from evaluate (roc only)
    #[arg(long)]
    pub band: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Jitter seed (beeswarm only, required there)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Plot only the first N records (beeswarm only)
    #[arg(long)]
    pub max_records: Option<usize>,
}

/// What a command read and wrote.
struct Outcome {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
    manifest: PathBuf,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    params: serde_json::Value,
    inputs: Vec<String>,
    outputs: Vec<String>,
    seed: Option<u64>,
    duration_seconds: f64,
}

/// Parses `args` (program name first), runs the command and writes its
/// manifest.
pub fn run<I, S>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let args = expand_config(args.into_iter().map(Into::into).collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            e.print().map_err(|e| CliError::Io(e.to_string()))?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let started = Instant::now();
    let outcome = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }?;
    let params = match &cli.command {
        Command::Synth(a) => serde_json::to_value(a),
        Command::Split(a) => serde_json::to_value(a),
        Command::Train(a) => serde_json::to_value(a),
        Command::Predict(a) | Command::Explain(a) => serde_json::to_value(a),
        Command::Evaluate(a) => serde_json::to_value(a),
        Command::SimulateBias(a) => serde_json::to_value(a),
        Command::Plot(a) => serde_json::to_value(a),
    }
    .map_err(|e| CliError::Io(e.to_string()))?;
    let show = |v: &[PathBuf]| v.iter().map(|p| p.display().to_string()).collect();
    let manifest = RunManifest {
        tool: "covboost",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        params,
        inputs: show(&outcome.inputs),
        outputs: show(&outcome.outputs),
        seed: outcome.seed,
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&outcome.manifest, text).map_err(|e| io_err(&outcome.manifest, e))
}

/// Splices `key=value` lines from a `--config` file in right after the
/// subcommand name, so flags given on the command line (which come later)
/// override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut config = None;
    for (i, a) in args.iter().enumerate() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        }
    }
    let Some(path) = config else { return Ok(args) };

    let root = Cli::command();
    let Some((at, sub)) = args
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| a.to_str().and_then(|s| root.find_subcommand(s)).map(|c| (i, c)))
    else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let mut spliced = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: &str| CliError::Usage(format!("{}:{}: {why}", path.display(), n + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| bad(&format!("unknown key `{key}` for {}", sub.get_name())))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            if bool::from_str(value).map_err(|_| bad("expected true or false"))? {
                spliced.push(OsString::from(format!("--{key}")));
            }
        } else {
            spliced.push(OsString::from(format!("--{key}")));
            spliced.push(OsString::from(value));
        }
    }
    let mut out = args;
    out.splice(at + 1..at + 1, spliced);
    Ok(out)
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Synth(a) => cmd_synth(a),
        Command::Split(a) => cmd_split(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::SimulateBias(a) => cmd_simulate_bias(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn manifest_beside(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let ds = load_csv(open(path)?).map_err(|e| match CliError::from(e) {
        CliError::Contract(m) => CliError::Contract(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(Dataset::new(ds.into_records(), format!("csv:{}", path.display())))
}

fn write_dataset(ds: &Dataset, path: &Path) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_csv(ds, &mut w).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

fn read_model(path: &Path) -> Result<Model, CliError> {
    Ok(load_model(open(path)?)?)
}

/// CSV writer with LF line endings.
fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))
}

/// Writes `header` then `rows`, flushing at the end.
fn write_table<R>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<(), CliError>
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn real(x: f64) -> String {
    fmt_real(x)
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{flag}: `{s}` is not a number")))
        })
        .collect()
}

fn cmd_synth(a: &SynthArgs) -> Result<Outcome, CliError> {
    let (marginals, inputs) = match &a.marginals {
        Some(p) => (TableCounts::parse(open(p)?)?.marginals()?, vec![p.clone()]),
        None => (MarginalTable::table_one(), vec![]),
    };
    let ds = synthesize(&marginals, a.n_pos, a.n_neg, a.seed)?;
    write_dataset(&ds, &a.out)?;
    println!(
        "wrote {} records ({} positive) to {}",
        ds.len(),
        ds.n_positive(),
        a.out.display()
    );
    Ok(Outcome {
        inputs,
        outputs: vec![a.out.clone()],
        seed: Some(a.seed),
        manifest: manifest_beside(&a.out),
    })
}

fn cmd_split(a: &SplitArgs) -> Result<Outcome, CliError> {
    let ds = read_dataset(&a.data)?;
    let (train, test) = split(&ds, a.test_fraction, a.seed, a.stratified)?;
    write_dataset(&train, &a.out_train)?;
    write_dataset(&test, &a.out_test)?;
    println!(
        "split {} records into {} train / {} test",
        ds.len(),
        train.len(),
        test.len()
    );
    Ok(Outcome {
        inputs: vec![a.data.clone()],
        outputs: vec![a.out_train.clone(), a.out_test.clone()],
        seed: Some(a.seed),
        manifest: manifest_beside(&a.out_train),
    })
}

fn cmd_train(a: &TrainArgs) -> Result<Outcome, CliError> {
    let ds = read_dataset(&a.data)?;
    let cfg = TrainConfig {
        num_rounds: a.num_rounds,
        learning_rate: a.learning_rate,
        max_leaves: a.max_leaves,
        min_samples_leaf: a.min_samples_leaf,
        l2_lambda: a.l2_lambda,
        min_split_gain: a.min_split_gain,
        seed: a.seed,
    };
    let model = fit(&ds, &cfg)?;
    let mut w = create(&a.out_model)?;
    save_model(&model, &mut w)?;
    w.flush().map_err(|e| io_err(&a.out_model, e))?;
    drop(w);
    // read back what was written
    if read_model(&a.out_model)? != model {
        return Err(CliError::Io(format!(
            "{}: model did not read back identically",
            a.out_model.display()
        )));
    }
    println!("trained {} trees on {} records", model.trees().len(), ds.len());
    Ok(Outcome {
        inputs: vec![a.data.clone()],
        outputs: vec![a.out_model.clone()],
        seed: Some(a.seed),
        manifest: manifest_beside(&a.out_model),
    })
}

fn cmd_predict(a: &PredictArgs) -> Result<Outcome, CliError> {
    let model = read_model(&a.model)?;
    let ds = read_dataset(&a.data)?;
    let rows = ds
        .iter()
        .enumerate()
        .map(|(i, r)| [i.to_string(), real(model.predict_proba(&r.features))]);
    write_table(&a.out, &["record_index", "score"], rows)?;
    Ok(Outcome {
        inputs: vec![a.model.clone(), a.data.clone()],
        outputs: vec![a.out.clone()],
        seed: None,
        manifest: manifest_beside(&a.out),
    })
}

fn cmd_explain(a: &PredictArgs) -> Result<Outcome, CliError> {
    let model = read_model(&a.model)?;
    let ds = read_dataset(&a.data)?;
    let explanations = TreeExplainer::new(&model)?.explain_all(&ds);
    let rows = explanations.iter().enumerate().flat_map(|(i, e)| {
        Feature::ALL.into_iter().map(move |f| {
            [
                i.to_string(),
                f.name().to_string(),
                (e.record[f.index()] as u8).to_string(),
                real(e.contribution(f)),
                real(e.base_value),
            ]
        })
    });
    write_table(
        &a.out,
        &["record_index", "feature", "feature_value", "shap_value", "base_value"],
        rows,
    )?;
    Ok(Outcome {
        inputs: vec![a.model.clone(), a.data.clone()],
        outputs: vec![a.out.clone()],
        seed: None,
        manifest: manifest_beside(&a.out),
    })
}

const REPORT_COLUMNS: [&str; 13] = [
    "threshold",
    "tp",
    "fp",
    "tn",
    "fn",
    "accuracy",
    "sensitivity",
    "specificity",
    "ppv",
    "npv",
    "fnr",
    "fpr",
    "fdr",
];

fn report_cells(r: &ThresholdReport<f64>) -> Vec<String> {
    let mut cells = vec![
        real(r.threshold),
        r.tp.to_string(),
        r.fp.to_string(),
        r.tn.to_string(),
        r.fn_.to_string(),
    ];
    cells.extend(
        [
            Some(r.accuracy),
            r.sensitivity,
            r.specificity,
            r.ppv,
            r.npv,
            r.fnr,
            r.fpr,
            r.fdr,
        ]
        .into_iter()
        .map(opt_real),
    );
    cells
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<Outcome, CliError> {
    let seed = match (a.bootstrap, a.seed) {
        (0, s) => s,
        (_, Some(s)) => Some(s),
        (_, None) => return Err(CliError::Usage("--seed is required when --bootstrap is nonzero".into())),
    };
    let sens_targets = a
        .target_sensitivity
        .as_deref()
        .map(|t| parse_list("target-sensitivity", t))
        .transpose()?
        .unwrap_or_default();
    let spec_targets = a
        .target_specificity
        .as_deref()
        .map(|t| parse_list("target-specificity", t))
        .transpose()?
        .unwrap_or_default();

    let model = read_model(&a.model)?;
    let ds = read_dataset(&a.data)?;
    let scores = ds.iter().map(|r| model.predict_proba(&r.features)).collect();
    let sl = ScoredLabels::new(scores, ds.labels().collect())?;
    let path = |name: &str| PathBuf::from(format!("{}{name}", a.out_prefix));
    let mut outputs = Vec::new();

    let auc = auroc(&sl)?;
    let ap = aupr(&sl)?;
    let (auc_ci, ap_ci, band) = if a.bootstrap > 0 {
        let s = seed.expect("checked above");
        (
            Some(bootstrap_ci(Metric::Auroc, &sl, a.bootstrap, a.alpha, s)?),
            Some(bootstrap_ci(Metric::Aupr, &sl, a.bootstrap, a.alpha, s)?),
            Some(roc_band(&sl, ROC_BAND_POINTS, a.bootstrap, a.alpha, s)?),
        )
    } else {
        (None, None, None)
    };

    let summary = path("summary.csv");
    write_table(
        &summary,
        &["metric", "value", "lo", "hi"],
        [("auroc", auc, &auc_ci), ("auprc", ap, &ap_ci)].map(|(name, v, ci)| {
            [
                name.to_string(),
                real(v),
                opt_real(ci.as_ref().map(|c| c.lo)),
                opt_real(ci.as_ref().map(|c| c.hi)),
            ]
        }),
    )?;
    outputs.push(summary);

    let thresholds = path("thresholds.csv");
    write_table(
        &thresholds,
        &REPORT_COLUMNS,
        threshold_table(&sl).iter().map(report_cells),
    )?;
    outputs.push(thresholds);

    let roc = path("roc.csv");
    write_table(
        &roc,
        &["fpr", "tpr", "threshold"],
        roc_curve(&sl)?
            .iter()
            .map(|p| [real(p.fpr), real(p.tpr), real(p.threshold)]),
    )?;
    outputs.push(roc);

    let pr = path("pr.csv");
    write_table(
        &pr,
        &["recall", "precision", "threshold"],
        pr_curve(&sl)?
            .iter()
            .map(|p| [real(p.recall), real(p.precision), real(p.threshold)]),
    )?;
    outputs.push(pr);

    if let Some(band) = band {
        let p = path("roc_band.csv");
        write_table(
            &p,
            &["fpr", "tpr_lo", "tpr_hi"],
            band.iter().map(|b| [real(b.fpr), real(b.tpr_lo), real(b.tpr_hi)]),
        )?;
        outputs.push(p);
    }

    if !sens_targets.is_empty() || !spec_targets.is_empty() {
        let mut rows = Vec::new();
        for &t in &sens_targets {
            let (_, r) = threshold_for_sensitivity(&sl, t)?;
            rows.push(
                ["sensitivity".to_string(), real(t)]
                    .into_iter()
                    .chain(report_cells(&r))
                    .collect::<Vec<_>>(),
            );
        }
        for &t in &spec_targets {
            let (_, r) = threshold_for_specificity(&sl, t)?;
            rows.push(
                ["specificity".to_string(), real(t)]
                    .into_iter()
                    .chain(report_cells(&r))
                    .collect(),
            );
        }
        let p = path("operating_points.csv");
        let header: Vec<&str> = ["criterion", "target"].into_iter().chain(REPORT_COLUMNS).collect();
        write_table(&p, &header, rows)?;
        outputs.push(p);
    }

    match &auc_ci {
        Some(c) => println!("auroc {auc:.4} ({:.4}-{:.4})", c.lo, c.hi),
        None => println!("auroc {auc:.4}"),
    }
    match &ap_ci {
        Some(c) => println!("auprc {ap:.4} ({:.4}-{:.4})", c.lo, c.hi),
        None => println!("auprc {ap:.4}"),
    }
    Ok(Outcome {
        inputs: vec![a.model.clone(), a.data.clone()],
        outputs,
        seed,
        manifest: path("manifest.json"),
    })
}

fn cmd_simulate_bias(a: &SimulateBiasArgs) -> Result<Outcome, CliError> {
    let fractions = parse_list("fractions", &a.fractions)?;
    let names: Vec<String> = fractions.iter().map(|f| format!("drop_{f}")).collect();
    if (1..names.len()).any(|i| names[..i].contains(&names[i])) {
        return Err(CliError::Usage("--fractions: repeated value".into()));
    }
    let ds = read_dataset(&a.data)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;

    let rate_row = |name: &str, fraction: Option<f64>, d: &Dataset| -> Vec<String> {
        let mut row = vec![
            name.to_string(),
            opt_real(fraction),
            d.len().to_string(),
            asymptomatic_negatives(d).len().to_string(),
        ];
        row.extend(Feature::ALL.map(|f| opt_real(reporter_positive_rate(d, f).ok())));
        row
    };
    let mut rows = vec![rate_row("input", None, &ds)];
    let mut outputs = Vec::new();
    for (i, (&fraction, name)) in fractions.iter().zip(&names).enumerate() {
        let cfg = BiasSimConfig {
            drop_fraction: fraction,
            seed: derive_seed(a.seed, i as u64),
        };
        let sim = simulate_bias(&ds, &cfg)?;
        let out = a.out_dir.join(format!("{name}.csv"));
        write_dataset(&sim, &out)?;
        rows.push(rate_row(name, Some(fraction), &sim));
        outputs.push(out);
    }
    let rates = a.out_dir.join("reporter_rates.csv");
    let header: Vec<&str> = ["dataset", "drop_fraction", "records", "asymptomatic_negatives"]
        .into_iter()
        .chain(Feature::ALL.map(Feature::name))
        .collect();
    write_table(&rates, &header, rows)?;
    outputs.push(rates);
    println!(
        "wrote {} simulated datasets to {}",
        fractions.len(),
        a.out_dir.display()
    );
    Ok(Outcome {
        inputs: vec![a.data.clone()],
        outputs,
        seed: Some(a.seed),
        manifest: a.out_dir.join("manifest.json"),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RocRow {
    fpr: f64,
    tpr: f64,
    #[allow(dead_code)]
    threshold: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrRow {
    recall: f64,
    precision: f64,
    #[allow(dead_code)]
    threshold: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BandRow {
    fpr: f64,
    tpr_lo: f64,
    tpr_hi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplainRow {
    record_index: usize,
    feature: String,
    feature_value: u8,
    shap_value: f64,
    #[allow(dead_code)]
    base_value: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let rows = csv::Reader::from_reader(open(path)?)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| csv_err(path, e))?;
    if rows.is_empty() {
        return Err(CliError::Contract(format!("{}: no rows", path.display())));
    }
    Ok(rows)
}

fn cmd_plot(a: &PlotArgs) -> Result<Outcome, CliError> {
    if a.band.is_some() && a.kind != PlotKind::Roc {
        return Err(CliError::Usage("--band applies to roc plots only".into()));
    }
    let mut inputs = vec![a.input.clone()];
    let doc = match a.kind {
        PlotKind::Roc => {
            let points: Vec<(f64, f64)> = read_rows::<RocRow>(&a.input)?.iter().map(|r| (r.fpr, r.tpr)).collect();
            let band = match &a.band {
                Some(p) => {
                    inputs.push(p.clone());
                    Some(
                        read_rows::<BandRow>(p)?
                            .iter()
                            .map(|r| (r.fpr, r.tpr_lo, r.tpr_hi))
                            .collect::<Vec<_>>(),
                    )
                }
                None => None,
            };
            svg::curve_svg(CurveKind::Roc, &points, band.as_deref())
        }
        PlotKind::Pr => {
            let points: Vec<(f64, f64)> = read_rows::<PrRow>(&a.input)?
                .iter()
                .map(|r| (r.recall, r.precision))
                .collect();
            svg::curve_svg(CurveKind::Pr, &points, None)
        }
        PlotKind::Beeswarm => {
            let seed = a
                .seed
                .ok_or_else(|| CliError::Usage("--seed is required for beeswarm plots".into()))?;
            let mut points = Vec::new();
            let mut seen = Vec::new();
            for row in read_rows::<ExplainRow>(&a.input)? {
                let feature = Feature::from_str(&row.feature)
                    .map_err(|e| CliError::Contract(format!("{}: {e}", a.input.display())))?;
                if row.feature_value > 1 {
                    return Err(CliError::Contract(format!(
                        "{}: feature_value {} is not 0 or 1",
                        a.input.display(),
                        row.feature_value
                    )));
                }
                if !seen.last().is_some_and(|&r| r == row.record_index) {
                    seen.push(row.record_index);
                }
                if a.max_records.is_some_and(|m| seen.len() > m) {
                    break;
                }
                points.push(SwarmPoint {
                    feature,
                    record_index: row.record_index,
                    shap_value: row.shap_value,
                    feature_value: row.feature_value == 1,
                });
            }
            svg::beeswarm_svg(&points, seed)
        }
    };
    let mut w = create(&a.out)?;
    w.write_all(doc.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&a.out, e))?;
    Ok(Outcome {
        inputs,
        outputs: vec![a.out.clone()],
        seed: a.seed,
        manifest: manifest_beside(&a.out),
    })
}
