//! The `co2cast` command line.
//!
//! Every subcommand reads an optional JSON [`RunConfig`] and writes JSON or
//! CSV artifacts. Exit status is 0 on success, 2 for usage or configuration
//! errors and 1 for failures while running.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::{prepare, read_csv, write_csv, Prepared, SplitRatios, TimeSeriesFrame, Window, WindowSpec};
use crate::error::{Error, Result};
use crate::evalsuite::{evaluate_forecast, event_pipeline, impute_series, EventReport, EventThreshold, WarmupFallback};
use crate::model::checkpoint::{load_checkpoint, save_checkpoint};
use crate::model::{AnyModel, Forecaster, ModelConfig, ModelKind};
use crate::numerics::Tensor2;
use crate::physics::{generate_scenario, inject_missingness, office_scenario, MissingSpec, OfficeScenario};
use crate::train::{fit, gradcheck, EpochRecord, GradcheckReport, TrainConfig};

pub const RUN_CONFIG_VERSION: u32 = 1;
pub const METRICS_VERSION: u32 = 1;
/// Inference repetitions averaged by `bench`.
pub const BENCH_RUNS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv(PathBuf),
    Simulate(OfficeScenario),
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Simulate(OfficeScenario::default())
    }
}

/// Declarative description of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub version: u32,
    pub data: DataSource,
    /// Cells to blank after loading, seeded by `seed`.
    pub missing: Option<MissingSpec>,
    pub model_kind: ModelKind,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub split: SplitRatios,
    pub missing_to_test: bool,
    pub horizons: Vec<usize>,
    pub out_dir: PathBuf,
    /// Seeds model initialisation, batch order and missingness.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: RUN_CONFIG_VERSION,
            data: DataSource::default(),
            missing: None,
            model_kind: ModelKind::PiadSrnn,
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            split: SplitRatios::default(),
            missing_to_test: true,
            horizons: vec![96, 192, 336, 720],
            out_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != RUN_CONFIG_VERSION {
            return Err(Error::InvalidArgument(format!(
                "run config version {} is not supported (expected {RUN_CONFIG_VERSION})",
                self.version
            )));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::InvalidArgument(
                "horizons must be a non-empty list of values ≥ 1".into(),
            ));
        }
        if let DataSource::Csv(p) = &self.data {
            if !p.exists() {
                return Err(Error::InvalidArgument(format!(
                    "data file {} does not exist",
                    p.display()
                )));
            }
        }
        self.model.validate()?;
        self.train.validate()?;
        self.split.validate()
    }

    /// Model configuration for one horizon, seeded from the run.
    pub fn model_for(&self, horizon: usize) -> ModelConfig {
        ModelConfig {
            horizon,
            seed: self.seed,
            ..self.model.clone()
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    pub fn load_frame(&self) -> Result<TimeSeriesFrame> {
        let frame = match &self.data {
            DataSource::Csv(p) => read_csv(p)?,
            DataSource::Simulate(o) => generate_scenario(&office_scenario(o))?,
        };
        match &self.missing {
            Some(spec) => inject_missingness(&frame, spec, self.seed),
            None => Ok(frame),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonMetrics {
    #[serde(rename = "T")]
    pub t: usize,
    pub mse: f64,
    pub mae: f64,
    pub mse_ppm: f64,
    pub mae_ppm: f64,
    pub windows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub params: usize,
    pub macs: usize,
    /// Left empty by `train` so its output stays reproducible.
    pub latency_ms_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    #[serde(rename = "T")]
    pub t: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub history: Vec<EpochRecord>,
}

/// The metrics document written by `train` and `forecast`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub version: u32,
    pub model: String,
    pub horizons: Vec<HorizonMetrics>,
    pub events: Option<EventReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_threshold: Option<EventThreshold>,
    pub efficiency: Efficiency,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub training: Vec<TrainingSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub version: u32,
    pub model: String,
    pub params: usize,
    pub macs: usize,
    pub runs: usize,
    pub latency_ms_mean: f64,
    /// Parameters plus one window's inputs, states and outputs, in bytes.
    pub peak_memory_bytes: usize,
}

#[derive(Parser, Debug)]
#[command(
    name = "co2cast",
    version,
    about = "Physics-informed CO2 forecasting, imputation and event scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate or train a single horizon instead of the configured list.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// CSV data, overriding the configured source.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a simulated office dataset as CSV.
    Simulate(Common),
    /// Train one model per horizon; write checkpoints and metrics.json.
    Train(Common),
    /// Evaluate a checkpoint on the test split.
    Forecast(Common),
    /// Fill masked CO2 cells with one-step forecasts.
    Impute {
        #[command(flatten)]
        common: Common,
        /// Fill gaps inside the first look-back with the training mean.
        #[arg(long)]
        fallback_mean: bool,
    },
    /// Classify high-CO2 events on the test split.
    Events(Common),
    /// Report parameter and MAC counts and inference latency.
    Bench(Common),
    /// Compare tape gradients with finite differences.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
        /// Training windows in the checked batch.
        #[arg(long, default_value_t = 2)]
        windows: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `co2cast --help` for usage.");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate(c) => simulate(&c),
        Command::Train(c) => train(&c),
        Command::Forecast(c) => forecast(&c),
        Command::Impute { common, fallback_mean } => impute(&common, fallback_mean),
        Command::Events(c) => events(&c),
        Command::Bench(c) => bench(&c),
        Command::Gradcheck {
            common,
            tolerance,
            windows,
        } => gradcheck_cmd(&common, tolerance, windows),
    }
}

/// Loads the config (or defaults) and applies command-line overrides.
fn resolve_config(c: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.horizon {
        cfg.horizons = vec![t];
    }
    if let Some(d) = &c.data {
        cfg.data = DataSource::Csv(d.clone());
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn require<'a>(opt: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a PathBuf> {
    opt.as_ref()
        .ok_or_else(|| Failure::Usage(format!("missing required flag --{flag}")))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value).expect("serialisable report");
    fs::write(path, text + "\n")?;
    Ok(())
}

fn simulate(c: &Common) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    if matches!(cfg.data, DataSource::Csv(_)) {
        return Err(Failure::Usage("simulate needs a `simulate` data source".into()));
    }
    let out = require(&c.out, "out")?;
    let frame = cfg.load_frame()?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::from)?;
    }
    write_csv(&frame, out)?;
    println!("wrote {} rows to {}", frame.len(), out.display());
    Ok(())
}

fn prepared(cfg: &RunConfig, frame: &TimeSeriesFrame, model: &ModelConfig) -> Result<Prepared> {
    prepare(
        frame,
        &model.target_channel,
        WindowSpec::new(model.lookback, model.horizon),
        cfg.split,
        cfg.missing_to_test,
    )
}

fn horizon_metrics(model: &AnyModel, data: &Prepared) -> Result<HorizonMetrics> {
    let test = data
        .test
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| Error::InvalidArgument("test split holds no complete window".into()))?;
    let r = evaluate_forecast(model, test, &data.normalizer)?;
    Ok(HorizonMetrics {
        t: r.horizon,
        mse: r.mse,
        mae: r.mae,
        mse_ppm: r.mse_ppm,
        mae_ppm: r.mae_ppm,
        windows: r.windows,
    })
}

/// Checkpoint file name for one horizon.
pub fn checkpoint_name(kind: ModelKind, horizon: usize) -> String {
    format!("{}_T{horizon}.json", kind.as_str())
}

fn train(c: &Common) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    let out_dir = c.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    fs::create_dir_all(&out_dir).map_err(Error::from)?;
    let frame = cfg.load_frame()?;

    let event_horizon = if cfg.horizons.contains(&96) {
        96
    } else {
        cfg.horizons[0]
    };
    let mut doc = MetricsDoc {
        version: METRICS_VERSION,
        model: cfg.model_kind.as_str().to_string(),
        horizons: Vec::new(),
        events: None,
        event_threshold: None,
        efficiency: Efficiency {
            params: 0,
            macs: 0,
            latency_ms_mean: None,
        },
        training: Vec::new(),
    };
    for &t in &cfg.horizons {
        let mcfg = cfg.model_for(t);
        let data = prepared(&cfg, &frame, &mcfg)?;
        let mut model = AnyModel::init(cfg.model_kind, mcfg)?;
        if let Some(trainable) = model.as_trainable_mut() {
            let rep = fit(trainable, &data.train, &data.val, &cfg.train_config())?;
            println!(
                "T={t}: best val MSE {:.4} at epoch {} of {}",
                rep.best_val_loss, rep.best_epoch, rep.epochs_run
            );
            doc.training.push(TrainingSummary {
                t,
                best_epoch: rep.best_epoch,
                best_val_loss: rep.best_val_loss,
                epochs_run: rep.epochs_run,
                stopped_early: rep.stopped_early,
                history: rep.history,
            });
        }
        let path = out_dir.join(checkpoint_name(cfg.model_kind, t));
        save_checkpoint(&model, Some(&data.normalizer), &path)?;
        doc.horizons.push(horizon_metrics(&model, &data)?);
        if t == event_horizon {
            doc.efficiency.params = model.param_count();
            doc.efficiency.macs = model.macs();
            let ev = event_pipeline(
                &model,
                &frame,
                &data.normalizer,
                &data.plan,
                &model.config().target_channel,
            )?;
            doc.events = Some(ev.report);
            doc.event_threshold = Some(ev.threshold);
        }
    }
    let metrics = out_dir.join("metrics.json");
    write_json(&metrics, &doc)?;
    println!("wrote {}", metrics.display());
    Ok(())
}

fn load_model(c: &Common) -> CliResult<crate::model::Checkpoint> {
    let path = require(&c.checkpoint, "checkpoint")?;
    if !path.exists() {
        return Err(Failure::Usage(format!("checkpoint {} does not exist", path.display())));
    }
    Ok(load_checkpoint(path)?)
}

fn forecast(c: &Common) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    let ck = load_model(c)?;
    let frame = cfg.load_frame()?;
    let mut data = prepared(&cfg, &frame, ck.model.config())?;
    if let Some(n) = ck.normalizer.clone() {
        // Re-cut windows with the normaliser the model was trained with.
        data = Prepared { normalizer: n, ..data };
        let m = ck.model.config();
        let spec = WindowSpec::new(m.lookback, m.horizon);
        if data.plan.test.len() >= spec.span() {
            data.test = Some(
                crate::dataio::make_windows(
                    &frame,
                    &data.normalizer,
                    &m.target_channel,
                    spec,
                    data.plan.test.clone(),
                )?
                .complete_only(),
            );
        }
    }
    let doc = MetricsDoc {
        version: METRICS_VERSION,
        model: ck.model.kind().as_str().to_string(),
        horizons: vec![horizon_metrics(&ck.model, &data)?],
        events: None,
        event_threshold: None,
        efficiency: Efficiency {
            params: ck.model.param_count(),
            macs: ck.model.macs(),
            latency_ms_mean: None,
        },
        training: Vec::new(),
    };
    let out = c
        .out
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join("forecast_metrics.json"));
    write_json(&out, &doc)?;
    let h = &doc.horizons[0];
    println!(
        "T={}: MSE {:.4}, MAE {:.4} over {} windows; wrote {}",
        h.t,
        h.mse,
        h.mae,
        h.windows,
        out.display()
    );
    Ok(())
}

fn normalizer_for(
    ck: &crate::model::Checkpoint,
    cfg: &RunConfig,
    frame: &TimeSeriesFrame,
) -> Result<crate::dataio::Normalizer> {
    match &ck.normalizer {
        Some(n) => Ok(n.clone()),
        None => Ok(prepared(cfg, frame, ck.model.config())?.normalizer),
    }
}

fn impute(c: &Common, fallback_mean: bool) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    let ck = load_model(c)?;
    let out = require(&c.out, "out")?;
    let frame = cfg.load_frame()?;
    let norm = normalizer_for(&ck, &cfg, &frame)?;
    let target = ck.model.config().target_channel.clone();
    let fallback = if fallback_mean {
        WarmupFallback::TrainingMean
    } else {
        WarmupFallback::Error
    };
    let before = frame.channel(&target)?.missing_count();
    let filled = impute_series(&ck.model, &frame, &norm, &target, fallback).map_err(|e| match e {
        Error::ImputeWarmup { .. } => Failure::Runtime(Error::InvalidArgument(format!(
            "{e}; pass --fallback-mean to fill such cells with the training mean"
        ))),
        other => Failure::Runtime(other),
    })?;
    write_csv(&filled, out)?;
    println!("filled {before} cells of `{target}`; wrote {}", out.display());
    Ok(())
}

fn events(c: &Common) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    let ck = load_model(c)?;
    let frame = cfg.load_frame()?;
    let data = prepared(&cfg, &frame, ck.model.config())?;
    let norm = ck.normalizer.clone().unwrap_or(data.normalizer);
    let outcome = event_pipeline(&ck.model, &frame, &norm, &data.plan, &ck.model.config().target_channel)?;
    let out = c.out.clone().unwrap_or_else(|| cfg.out_dir.join("events.json"));
    write_json(&out, &outcome)?;
    let r = &outcome.report;
    println!(
        "threshold {:.2} ppm: TP {} FP {} TN {} FN {}, F1 {:.4}; wrote {}",
        outcome.threshold.threshold,
        r.tp,
        r.fp,
        r.tn,
        r.fn_,
        r.f1,
        out.display()
    );
    Ok(())
}

/// Mean wall-clock milliseconds of `runs` single-window forecasts.
pub fn measure_latency(model: &dyn Forecaster, input: &Tensor2, channels: &[String], runs: usize) -> Result<f64> {
    let mut total = 0.0;
    for _ in 0..runs {
        let started = Instant::now();
        std::hint::black_box(model.forecast(std::hint::black_box(input), channels)?);
        total += started.elapsed().as_secs_f64() * 1e3;
    }
    Ok(total / runs.max(1) as f64)
}

/// Bytes for parameters plus one window's input, state trace and output.
pub fn peak_memory_estimate(model: &AnyModel) -> usize {
    let c = model.config();
    let floats = model.param_count() + c.lookback * c.input_dim + (c.lookback + 1) * c.state_dim * 2 + c.horizon * 3;
    floats * std::mem::size_of::<f64>()
}

pub fn bench_model(model: &AnyModel) -> Result<BenchReport> {
    let c = model.config();
    let channels: Vec<String> = crate::dataio::CHANNELS.iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let data = (0..c.lookback * channels.len())
        .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
        .collect();
    let input = Tensor2::from_vec(c.lookback, channels.len(), data)?;
    // One untimed pass to warm caches.
    model.forecast(&input, &channels)?;
    Ok(BenchReport {
        version: METRICS_VERSION,
        model: model.kind().as_str().to_string(),
        params: model.param_count(),
        macs: model.macs(),
        runs: BENCH_RUNS,
        latency_ms_mean: measure_latency(model, &input, &channels, BENCH_RUNS)?,
        peak_memory_bytes: peak_memory_estimate(model),
    })
}

fn bench(c: &Common) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    let model = match &c.checkpoint {
        Some(_) => load_model(c)?.model,
        None => AnyModel::init(cfg.model_kind, cfg.model_for(cfg.horizons[0]))?,
    };
    let report = bench_model(&model)?;
    println!(
        "{}: {} params, {} MACs, {:.3} ms mean over {} runs, ~{} KiB",
        report.model,
        report.params,
        report.macs,
        report.latency_ms_mean,
        report.runs,
        report.peak_memory_bytes / 1024
    );
    if let Some(out) = &c.out {
        write_json(out, &report)?;
    }
    Ok(())
}

fn gradcheck_cmd(c: &Common, tolerance: f64, windows: usize) -> CliResult<()> {
    let cfg = resolve_config(c)?;
    if windows == 0 {
        return Err(Failure::Usage("--windows must be ≥ 1".into()));
    }
    let mcfg = cfg.model_for(cfg.horizons[0]);
    let frame = cfg.load_frame()?;
    let data = prepared(&cfg, &frame, &mcfg)?;
    let mut model = match cfg.model_kind {
        ModelKind::Persistence => return Err(Failure::Usage("persistence has no parameters to check".into())),
        kind => AnyModel::init(kind, mcfg)?,
    };
    let batch: Vec<&Window> = data.train.iter().take(windows).collect();
    let channels = data.train.channels.clone();
    let trainable = model.as_trainable_mut().expect("learnable model");
    let report: GradcheckReport = gradcheck(trainable, &batch, &channels, tolerance)?;
    println!(
        "max relative error {:.3e} over {} entries ({} skipped at ReLU kinks): {}",
        report.max_rel_error,
        report.checked,
        report.skipped,
        if report.passed { "pass" } else { "FAIL" }
    );
    if let Some(out) = &c.out {
        write_json(out, &report)?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Runtime(Error::InvalidArgument(format!(
            "gradient check failed: {:.3e} ≥ {tolerance:e}",
            report.max_rel_error
        ))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.horizons, vec![96, 192, 336, 720]);
        let partial: RunConfig = serde_json::from_str(r#"{"version": 1, "horizons": [24]}"#).unwrap();
        assert_eq!(partial.horizons, vec![24]);
        assert_eq!(partial.model, ModelConfig::default());
    }

    #[test]
    fn config_validation() {
        let bad = RunConfig {
            horizons: vec![],
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            version: 9,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            data: DataSource::Csv("/definitely/not/here.csv".into()),
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["co2cast", "frobnicate"]), 2);
        assert_eq!(run(["co2cast", "simulate"]), 2);
        assert_eq!(run(["co2cast", "forecast", "--checkpoint", "/no/such/file.json"]), 2);
    }

    #[test]
    fn metrics_schema_keys() {
        let doc = MetricsDoc {
            version: 1,
            model: "piad-srnn".into(),
            horizons: vec![HorizonMetrics {
                t: 96,
                mse: 0.5,
                mae: 0.25,
                mse_ppm: 10.0,
                mae_ppm: 2.0,
                windows: 3,
            }],
            events: Some(EventReport::from_counts(1, 2, 3, 4)),
            event_threshold: None,
            efficiency: Efficiency {
                params: 1,
                macs: 2,
                latency_ms_mean: None,
            },
            training: vec![],
        };
        let v = serde_json::to_value(&doc).unwrap();
        for key in ["version", "model", "horizons", "events", "efficiency"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for key in ["T", "mse", "mae", "mse_ppm", "mae_ppm"] {
            assert!(v["horizons"][0].get(key).is_some(), "{key}");
        }
        for key in ["tp", "fp", "tn", "fn", "accuracy", "precision", "recall", "f1"] {
            assert!(v["events"].get(key).is_some(), "{key}");
        }
        for key in ["params", "macs", "latency_ms_mean"] {
            assert!(v["efficiency"].get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn peak_memory_counts_parameters() {
        let m = AnyModel::init(
            ModelKind::PiadSrnn,
            ModelConfig {
                lookback: 8,
                horizon: 2,
                state_dim: 4,
                ..ModelConfig::default()
            },
        )
        .unwrap();
        assert_eq!(peak_memory_estimate(&m), (72 + 40 + 9 * 8 + 6) * 8);
    }
}
