//! Command-line front end: `gen`, `train`, `evaluate` and `savings`.
//!
//! Settings resolve as CLI flag, then `--config` TOML file, then built-in
//! default. Every artifact is written atomically under `--out`:
//!
//! ```text
//! out/<room>/model_w<W>.json   model (+ model_w<W>.norm sidecar)
//! out/loss_<room>_w<W>.csv     per-epoch training loss
//! out/metrics.csv              one row per (room, W)
//! out/savings.csv              per-room savings plus AVERAGE
//! ```

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::{NaiveDate, NaiveDateTime};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::energy::{parse_replay_csv, savings_report, EnergyConfig};
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::lstm::{ModelFile, TrainConfig};
use crate::metrics::metrics_csv;
use crate::pipeline::{
    evaluate_room, oracle_predictions, savings_room, train_room, ExperimentConfig, TrainedModel,
    DEFAULT_TRAIN_FRACTION,
};
use crate::plot::metrics_svg;
use crate::synthgen::{generate, room_ids, write_datasets, GenConfig, DEFAULT_WEEKS};
use crate::timeseries::{load_csv, Dataset, WindowSpec};

#[derive(Debug, Parser)]
#[command(
    name = "occupancy-hvac",
    version,
    about = "LSTM occupancy forecasting and occupancy-based HVAC savings"
)]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Concurrent (room, window) jobs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic per-room telemetry CSVs.
    Gen(GenArgs),
    /// Train one model per (room, window).
    Train(TrainArgs),
    /// Score trained models over a window sweep.
    Evaluate(EvaluateArgs),
    /// Estimate energy savings against the rule-based baseline.
    Savings(SavingsArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub rooms: Option<usize>,
    #[arg(long)]
    pub weeks: Option<u32>,
    /// First day, YYYY-MM-DD.
    #[arg(long)]
    pub start: Option<NaiveDate>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV files or directories of CSV files (one file per room).
    #[arg(long, value_delimiter = ',')]
    pub data: Vec<PathBuf>,
    /// Restrict to these room ids.
    #[arg(long = "room", value_delimiter = ',')]
    pub rooms: Vec<String>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Prediction windows in minutes.
    #[arg(long = "window", value_delimiter = ',')]
    pub windows: Vec<u32>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long = "lr")]
    pub learning_rate: Option<f64>,
    #[arg(long = "tbptt")]
    pub tbptt_segment: Option<usize>,
    /// Append current occupancy to the model inputs.
    #[arg(long)]
    pub include_occupancy: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long = "windows", alias = "window", value_delimiter = ',')]
    pub windows: Vec<u32>,
    /// Directory holding trained models (defaults to the output directory).
    #[arg(long)]
    pub models: Option<PathBuf>,
    /// Score the true windowed targets instead of a model.
    #[arg(long)]
    pub oracle: bool,
    /// Also write metrics.svg.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct SavingsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub window: Option<u32>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub cp: Option<f64>,
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long)]
    pub oracle: bool,
    /// Recompute the report from a CSV of (room, actual_energy, saved_energy).
    #[arg(long)]
    pub replay_table2: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
    data: Option<Vec<PathBuf>>,
    rooms: Option<Vec<String>>,
    windows: Option<Vec<u32>>,
    train_fraction: Option<f64>,
    include_occupancy: Option<bool>,
    models: Option<PathBuf>,
    #[serde(default)]
    train: TrainSection,
    #[serde(default)]
    energy: EnergySection,
    #[serde(default)]
    gen: GenSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainSection {
    hidden: Option<usize>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    tbptt_segment: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergySection {
    cp: Option<f64>,
    heating_months: Option<Vec<u32>>,
    unoccupied_threshold: Option<f64>,
    control_window: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenSection {
    rooms: Option<usize>,
    weeks: Option<u32>,
    start: Option<NaiveDate>,
    arrival_hour_mean: Option<f64>,
    arrival_hour_std: Option<f64>,
    departure_hour_mean: Option<f64>,
    departure_hour_std: Option<f64>,
    weekend_occupancy_prob: Option<f64>,
    flip_prob: Option<f64>,
    revert_prob: Option<f64>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Fully resolved settings shared by all subcommands.
struct Context {
    out: PathBuf,
    seed: u64,
    jobs: usize,
    file: FileConfig,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let file = load_file_config(cli.config.as_deref())?;
        let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        Ok(Context {
            out: cli
                .out
                .clone()
                .or(file.out.clone())
                .unwrap_or_else(|| "out".into()),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            jobs,
            file,
        })
    }

    fn train_fraction(&self, args: &DataArgs) -> Result<f64> {
        let f = args
            .train_fraction
            .or(self.file.train_fraction)
            .unwrap_or(DEFAULT_TRAIN_FRACTION);
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1), got {f}"
            )));
        }
        Ok(f)
    }

    fn energy(
        &self,
        window: Option<u32>,
        threshold: Option<f64>,
        cp: Option<f64>,
    ) -> Result<EnergyConfig> {
        let d = EnergyConfig::default();
        let e = &self.file.energy;
        let cfg = EnergyConfig {
            cp: cp.or(e.cp).unwrap_or(d.cp),
            heating_months: e.heating_months.clone().unwrap_or(d.heating_months),
            unoccupied_threshold: threshold
                .or(e.unoccupied_threshold)
                .unwrap_or(d.unoccupied_threshold),
            control_window: window.or(e.control_window).unwrap_or(d.control_window),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn windows(&self, flags: &[u32], fallback: &[u32]) -> Result<Vec<WindowSpec>> {
        let list = if !flags.is_empty() {
            flags.to_vec()
        } else if let Some(w) = &self.file.windows {
            w.clone()
        } else {
            fallback.to_vec()
        };
        if list.is_empty() {
            return Err(Error::Config("no prediction windows requested".into()));
        }
        list.into_iter().map(WindowSpec::supported).collect()
    }

    fn models_dir(&self, flag: &Option<PathBuf>) -> PathBuf {
        flag.clone()
            .or(self.file.models.clone())
            .unwrap_or_else(|| self.out.clone())
    }

    /// Loads every requested room up front so bad inputs fail before any output.
    fn datasets(&self, args: &DataArgs) -> Result<Vec<Dataset>> {
        let inputs = if !args.data.is_empty() {
            args.data.clone()
        } else {
            self.file.data.clone().unwrap_or_default()
        };
        if inputs.is_empty() {
            return Err(Error::Config("no input data given (use --data)".into()));
        }
        let mut files = Vec::new();
        for p in &inputs {
            if p.is_dir() {
                let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                    .map_err(|e| Error::io(p, e))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                    .collect();
                found.sort();
                files.extend(found);
            } else if p.is_file() {
                files.push(p.clone());
            } else {
                return Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
                ));
            }
        }
        let wanted = if !args.rooms.is_empty() {
            args.rooms.clone()
        } else {
            self.file.rooms.clone().unwrap_or_default()
        };
        let mut datasets = Vec::new();
        for f in files {
            let room = f
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Config(format!("bad file name {}", f.display())))?
                .to_string();
            if !wanted.is_empty() && !wanted.contains(&room) {
                continue;
            }
            if datasets.iter().any(|d: &Dataset| d.room_id() == room) {
                return Err(Error::Config(format!("room {room} given twice")));
            }
            datasets.push(load_csv(&f, &room)?);
        }
        if let Some(missing) = wanted
            .iter()
            .find(|r| !datasets.iter().any(|d| d.room_id() == *r))
        {
            return Err(Error::Config(format!(
                "room {missing} not found in the input data"
            )));
        }
        if datasets.is_empty() {
            return Err(Error::Config("input data contains no CSV files".into()));
        }
        Ok(datasets)
    }
}

pub fn model_path(dir: &Path, room: &str, window: u32) -> PathBuf {
    dir.join(room).join(format!("model_w{window}.json"))
}

pub fn loss_path(dir: &Path, room: &str, window: u32) -> PathBuf {
    dir.join(format!("loss_{room}_w{window}.csv"))
}

/// Runs `f(0..n)` on up to `jobs` threads; results keep index order.
fn run_jobs<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(n) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let r = f(i);
                slots.lock().expect("job slot lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("job slot lock")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn load_model(dir: &Path, room: &str, w: WindowSpec) -> Result<TrainedModel> {
    let path = model_path(dir, room, w.minutes());
    if !path.is_file() {
        return Err(Error::Model(format!(
            "no trained model for room {room}, window {w} (expected {})",
            path.display()
        )));
    }
    let (model, stats) = ModelFile::load(&path)?;
    if model.train_config.window != w.minutes() {
        return Err(Error::Model(format!(
            "{} was trained for window {}, not {w}",
            path.display(),
            model.train_config.window
        )));
    }
    Ok(TrainedModel { model, stats })
}

pub fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli)?;
    let g = &ctx.file.gen;
    let base = GenConfig::default();
    let rooms = args.rooms.or(g.rooms).unwrap_or(base.rooms.len());
    if rooms == 0 {
        return Err(Error::Config("--rooms must be at least 1".into()));
    }
    let weeks = args.weeks.or(g.weeks).unwrap_or(DEFAULT_WEEKS);
    if weeks == 0 {
        return Err(Error::Config("--weeks must be at least 1".into()));
    }
    let start: NaiveDateTime = match args.start.or(g.start) {
        Some(d) => d.and_hms_opt(0, 0, 0).expect("midnight"),
        None => base.start,
    };
    let cfg = GenConfig {
        seed: ctx.seed,
        start,
        rooms: room_ids(rooms),
        arrival_hour_mean: g.arrival_hour_mean.unwrap_or(base.arrival_hour_mean),
        arrival_hour_std: g.arrival_hour_std.unwrap_or(base.arrival_hour_std),
        departure_hour_mean: g.departure_hour_mean.unwrap_or(base.departure_hour_mean),
        departure_hour_std: g.departure_hour_std.unwrap_or(base.departure_hour_std),
        weekend_occupancy_prob: g
            .weekend_occupancy_prob
            .unwrap_or(base.weekend_occupancy_prob),
        flip_prob: g.flip_prob.unwrap_or(base.flip_prob),
        revert_prob: g.revert_prob.unwrap_or(base.revert_prob),
        ..base
    }
    .with_weeks(weeks);
    let datasets = generate(&cfg)?;
    let paths = write_datasets(&datasets, &ctx.out)?;
    log::info!(
        "wrote {} room file(s) to {}",
        paths.len(),
        ctx.out.display()
    );
    Ok(paths)
}

pub fn cmd_train(cli: &Cli, args: &TrainArgs) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli)?;
    let fraction = ctx.train_fraction(&args.data)?;
    let default_window = ctx.energy(None, None, None)?.control_window;
    let windows = ctx.windows(&args.windows, &[default_window])?;
    let t = &ctx.file.train;
    let d = TrainConfig::default();
    let base = TrainConfig {
        hidden: args.hidden.or(t.hidden).unwrap_or(d.hidden),
        epochs: args.epochs.or(t.epochs).unwrap_or(d.epochs),
        learning_rate: args
            .learning_rate
            .or(t.learning_rate)
            .unwrap_or(d.learning_rate),
        tbptt_segment: args
            .tbptt_segment
            .or(t.tbptt_segment)
            .unwrap_or(d.tbptt_segment),
        seed: ctx.seed,
        ..d
    };
    TrainConfig {
        window: windows[0].minutes(),
        ..base.clone()
    }
    .validate()?;
    let include_occupancy = args.include_occupancy || ctx.file.include_occupancy.unwrap_or(false);
    let datasets = ctx.datasets(&args.data)?;

    let jobs: Vec<(usize, WindowSpec)> = (0..datasets.len())
        .flat_map(|r| windows.iter().map(move |w| (r, *w)))
        .collect();
    let written = run_jobs(jobs.len(), ctx.jobs, |j| {
        let (r, w) = jobs[j];
        let d = &datasets[r];
        let cfg = ExperimentConfig {
            train: TrainConfig {
                window: w.minutes(),
                ..base.clone()
            },
            train_fraction: fraction,
            include_occupancy,
        };
        log::info!("training room {} window {w}", d.room_id());
        let (trained, log) = train_room(d, &cfg)?;
        let model = model_path(&ctx.out, d.room_id(), w.minutes());
        trained.model.save(&model, &trained.stats)?;
        let loss = loss_path(&ctx.out, d.room_id(), w.minutes());
        write_atomic(&loss, log.to_csv().as_bytes())?;
        Ok(vec![model, loss])
    })?;
    Ok(written.into_iter().flatten().collect())
}

pub fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli)?;
    let fraction = ctx.train_fraction(&args.data)?;
    let windows = ctx.windows(&args.windows, &WindowSpec::SWEEP)?;
    let models = ctx.models_dir(&args.models);
    let datasets = ctx.datasets(&args.data)?;

    let jobs: Vec<(usize, WindowSpec)> = (0..datasets.len())
        .flat_map(|r| windows.iter().map(move |w| (r, *w)))
        .collect();
    if !args.oracle {
        for &(r, w) in &jobs {
            let path = model_path(&models, datasets[r].room_id(), w.minutes());
            if !path.is_file() {
                return Err(Error::Model(format!(
                    "no trained model for room {}, window {w} (expected {})",
                    datasets[r].room_id(),
                    path.display()
                )));
            }
        }
    }
    let reports = run_jobs(jobs.len(), ctx.jobs, |j| {
        let (r, w) = jobs[j];
        let d = &datasets[r];
        let preds = if args.oracle {
            oracle_predictions(d, w)
        } else {
            load_model(&models, d.room_id(), w)?.predict(d)?
        };
        let report = evaluate_room(&preds, d, w, fraction)?;
        if report.auroc.is_none() || report.average_precision.is_none() {
            log::warn!(
                "room {} window {w}: test targets are single-class, undefined metrics reported as n/a",
                d.room_id()
            );
        }
        Ok(report)
    })?;

    let mut written = Vec::new();
    let metrics = ctx.out.join("metrics.csv");
    write_atomic(&metrics, metrics_csv(&reports).as_bytes())?;
    written.push(metrics);
    if args.plot {
        let svg = ctx.out.join("metrics.svg");
        write_atomic(&svg, metrics_svg(&reports).as_bytes())?;
        written.push(svg);
    }
    Ok(written)
}

pub fn cmd_savings(cli: &Cli, args: &SavingsArgs) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli)?;
    let out = ctx.out.join("savings.csv");
    if let Some(path) = &args.replay_table2 {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report = savings_report(parse_replay_csv(&text)?)?;
        write_atomic(&out, report.to_csv().as_bytes())?;
        return Ok(vec![out]);
    }

    let energy = ctx.energy(args.window, args.threshold, args.cp)?;
    let w = WindowSpec::supported(energy.control_window)?;
    let fraction = ctx.train_fraction(&args.data)?;
    let models = ctx.models_dir(&args.models);
    let datasets = ctx.datasets(&args.data)?;
    if !args.oracle {
        for d in &datasets {
            let path = model_path(&models, d.room_id(), w.minutes());
            if !path.is_file() {
                return Err(Error::Model(format!(
                    "no trained model for room {}, window {w} (expected {})",
                    d.room_id(),
                    path.display()
                )));
            }
        }
    }
    let rows = run_jobs(datasets.len(), ctx.jobs, |r| {
        let d = &datasets[r];
        let preds = if args.oracle {
            oracle_predictions(d, w)
        } else {
            load_model(&models, d.room_id(), w)?.predict(d)?
        };
        savings_room(&preds, d, fraction, &energy)
    })?;
    let report = savings_report(rows)?;
    write_atomic(&out, report.to_csv().as_bytes())?;
    Ok(vec![out])
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a),
        Command::Train(a) => cmd_train(cli, a),
        Command::Evaluate(a) => cmd_evaluate(cli, a),
        Command::Savings(a) => cmd_savings(cli, a),
    }
}

/// Parses `args` (program name first) and runs the subcommand. Usage errors
/// come back as [`Error::Config`].
pub fn run_from<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    run(&cli)
}
