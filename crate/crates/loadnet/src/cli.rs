//! `loadnet` subcommands.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime};
use clap::{Args, Parser, Subcommand};
use loadnet_core::aggregate::{self, Scale, ScaleDataset};
use loadnet_core::calendar::{HolidayCalendar, HourRange};
use loadnet_core::experiments::{
    factor_ablation, fit_model, hidden_layer_search, lag_sweep, parse_candidates, TrialMetrics,
};
use loadnet_core::features::{build_design_matrix, FeatureSpec, NormParams};
use loadnet_core::ingest::{finalize_series, repair_block, repair_local, ContinuityReport};
use loadnet_core::nn::{self, NetworkParameters};
use loadnet_core::synth::{self, format_hour, InjectionLog, SynthConfig};
use serde::{Deserialize, Serialize};

use crate::config::{parse_factors, parse_split, RunConfig};
use crate::exec::Pool;
use crate::report::{self, Document};
use crate::{io, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "loadnet",
    version,
    about = "Household load forecasting with a small feedforward network"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic consumption, weather and holiday files.
    Synth(SynthArgs),
    /// Merge, check and repair raw hourly files.
    Ingest(IngestArgs),
    /// Aggregate a clean hourly series to one scale.
    Aggregate(AggregateArgs),
    /// Train one network and save it as JSON.
    Train(RunArgs),
    /// Apply a saved network to a series or dataset.
    Predict(PredictArgs),
    /// Lag-window sweep with and without context factors.
    Sweep(RunArgs),
    /// Drop one context factor at a time.
    Ablate(RunArgs),
    /// Try several hidden-layer sizes.
    SearchHidden(SearchArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First day (inclusive).
    #[arg(long)]
    start: Option<NaiveDate>,
    /// Last day (inclusive).
    #[arg(long)]
    end: Option<NaiveDate>,
    #[arg(long)]
    gap_rate: Option<f64>,
    #[arg(long)]
    sentinel_rate: Option<f64>,
    #[arg(long)]
    noise_sd: Option<f64>,
    /// Number of multi-hour outages.
    #[arg(long)]
    outages: Option<usize>,
    #[arg(long)]
    outage_hours: Option<usize>,
    /// Hour-level temperature noise, °F.
    #[arg(long)]
    temp_jitter: Option<f64>,
    /// No noise, gaps, sentinels or outages.
    #[arg(long)]
    clean: bool,
    /// Write an empty holiday file and use no holidays.
    #[arg(long)]
    no_holidays: bool,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Directory holding consumption.csv and weather.csv.
    #[arg(long = "in", conflicts_with_all = ["consumption", "weather"])]
    input: Option<PathBuf>,
    #[arg(long, requires = "weather")]
    consumption: Option<PathBuf>,
    #[arg(long, requires = "consumption")]
    weather: Option<PathBuf>,
    /// Range start (date or hour timestamp).
    #[arg(long, value_parser = parse_instant)]
    start: Option<NaiveDateTime>,
    /// Range end, exclusive (date or hour timestamp).
    #[arg(long, value_parser = parse_instant)]
    end: Option<NaiveDateTime>,
    /// Continuity report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Clean hourly series CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    /// Clean hourly series CSV.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    holidays: Option<PathBuf>,
    #[arg(long)]
    scale: Scale,
    /// Dataset CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Clean hourly series CSV or dataset CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    holidays: Option<PathBuf>,
    #[arg(long)]
    scale: Option<Scale>,
    #[arg(long)]
    lags: Option<usize>,
    /// Include context factors (true/false).
    #[arg(long)]
    context: Option<bool>,
    /// Comma-separated context columns to keep.
    #[arg(long)]
    factors: Option<String>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Train, validation and test fractions, e.g. `0.7,0.15,0.15`.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Maximum concurrent trials.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file (train) or directory (sweep, ablate, search-hidden).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Hidden-node counts, e.g. `4,8,15..17`.
    #[arg(long, default_value = "4,5,10,14,15,31")]
    candidates: String,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Clean hourly series CSV or dataset CSV.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    holidays: Option<PathBuf>,
    /// Prediction CSV.
    #[arg(long)]
    out: PathBuf,
}

fn parse_instant(text: &str) -> std::result::Result<NaiveDateTime, String> {
    if let Some(t) = io::parse_timestamp(text) {
        return Ok(t);
    }
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight exists"))
        .map_err(|_| format!("`{text}` is neither a date nor a whole-hour timestamp"))
}

/// A trained network with everything `predict` needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub config: BTreeMap<String, String>,
    pub features: FeatureSpec,
    pub feature_names: Vec<String>,
    pub norm: NormParams,
    pub network: NetworkParameters,
    pub epochs_run: usize,
    pub best_val_loss: f64,
    pub test_metrics: TrialMetrics,
}

/// Synthetic generator settings and what it corrupted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionFile {
    pub config: SynthConfig,
    pub log: InjectionLog,
}

pub const CONSUMPTION_FILE: &str = "consumption.csv";
pub const WEATHER_FILE: &str = "weather.csv";
pub const HOLIDAYS_FILE: &str = "holidays.txt";
pub const TRUTH_FILE: &str = "truth.csv";
pub const INJECTIONS_FILE: &str = "injections.json";

/// Runs the CLI and returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return err.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::SearchHidden(a) => cmd_search(a),
    }
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mut config = SynthConfig {
        seed: a.seed,
        ..SynthConfig::default()
    };
    if a.start.is_some() || a.end.is_some() {
        let start = a.start.unwrap_or_else(|| config.range.start().date());
        let end = a
            .end
            .unwrap_or_else(|| config.range.end().date().pred_opt().expect("valid date"));
        config.range = HourRange::days(start, end)?;
    }
    if a.clean {
        config = config.clean();
    }
    if a.no_holidays {
        config.holidays = HolidayCalendar::new();
    }
    if let Some(v) = a.gap_rate {
        config.gap_rate = v;
    }
    if let Some(v) = a.sentinel_rate {
        config.sentinel_rate = v;
    }
    if let Some(v) = a.noise_sd {
        config.noise_sd = v;
    }
    if let Some(v) = a.outages {
        config.outage_count = v;
    }
    if let Some(v) = a.outage_hours {
        config.outage_hours = v;
    }
    if let Some(v) = a.temp_jitter {
        config.weather.temp_jitter_sd = v;
    }
    config.validate()?;

    let output = synth::generate(&config);
    io::write_text(&a.out.join(CONSUMPTION_FILE), &output.consumption_csv)?;
    io::write_text(&a.out.join(WEATHER_FILE), &output.weather_csv)?;
    io::write_text(&a.out.join(HOLIDAYS_FILE), &output.holidays_txt)?;
    io::write_series(&a.out.join(TRUTH_FILE), &output.truth)?;
    let missing = output.log.missing_hours().len();
    let sentinels = output.log.sentinels.len();
    io::write_json(
        &a.out.join(INJECTIONS_FILE),
        &InjectionFile {
            config,
            log: output.log,
        },
    )?;
    println!(
        "wrote {} hours to {} ({missing} missing, {sentinels} sentinels)",
        output.truth.len(),
        a.out.display()
    );
    Ok(())
}

fn summary(report: &ContinuityReport) -> String {
    format!(
        "{} hours expected, {} present, {} point gaps, {} block gaps, {} sentinel hits",
        report.expected_count,
        report.actual_count,
        report.point_gaps.len(),
        report.block_gaps.len(),
        report.sentinel_hits.len()
    )
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let (consumption, weather) = match (&a.input, a.consumption, a.weather) {
        (Some(dir), _, _) => (dir.join(CONSUMPTION_FILE), dir.join(WEATHER_FILE)),
        (None, Some(c), Some(w)) => (c, w),
        _ => {
            return Err(Error::Config(
                "give --in DIR or both --consumption and --weather".into(),
            ))
        }
    };
    let range = match (a.start, a.end) {
        (Some(s), Some(e)) => Some(HourRange::new(s, e)?),
        (None, None) => None,
        _ => return Err(Error::Config("--start and --end go together".into())),
    };
    let (records, report, range) = io::parse_hourly_files(&consumption, &weather, range)?;
    if let Some(path) = &a.report {
        io::write_json(path, &report)?;
    }
    println!("{}", summary(&report));
    if let Some(out) = &a.out {
        let records = repair_local(&records, &report)?;
        let records = repair_block(&records, &report)?;
        let series = finalize_series(&records, range)?;
        io::write_series(out, &series)?;
    }
    Ok(())
}

fn holidays_or_empty(path: Option<&Path>) -> Result<HolidayCalendar> {
    match path {
        Some(p) => io::read_holidays(p),
        None => {
            log::warn!("no holiday file given; every day is treated as a working day or weekend");
            Ok(HolidayCalendar::new())
        }
    }
}

fn cmd_aggregate(a: AggregateArgs) -> Result<()> {
    let series = io::read_series(&a.data)?;
    let holidays = holidays_or_empty(a.holidays.as_deref())?;
    for outside in holidays.outside(&series.range()) {
        log::warn!("holiday {outside} lies outside the series");
    }
    let dataset = aggregate::build(a.scale, &series, &holidays)?;
    io::write_dataset(&a.out, &dataset)?;
    println!(
        "wrote {} {} rows to {}",
        dataset.len(),
        a.scale,
        a.out.display()
    );
    Ok(())
}

/// Reads `path` as a dataset CSV when its header says so, otherwise as a
/// clean hourly series aggregated to `scale`.
fn load_dataset(path: &Path, holidays: Option<&Path>, scale: Scale) -> Result<ScaleDataset> {
    let text = io::read_text(path)?;
    if text.starts_with(io::PERIOD_COLUMN) {
        let dataset = io::parse_dataset(&text, path)?;
        if dataset.scale() != scale {
            return Err(loadnet_core::Error::ScaleMismatch {
                expected: scale.name(),
                got: dataset.scale().name(),
            }
            .into());
        }
        return Ok(dataset);
    }
    let series = io::parse_series(&text, path)?;
    Ok(aggregate::build(
        scale,
        &series,
        &holidays_or_empty(holidays)?,
    )?)
}

fn resolve(a: &RunArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &a.data {
        c.data = Some(v.clone());
    }
    if let Some(v) = &a.holidays {
        c.holidays = Some(v.clone());
    }
    if let Some(v) = a.scale {
        c.scale = v;
    }
    if let Some(v) = a.lags {
        c.lags = v;
    }
    if let Some(v) = a.context {
        c.context = v;
    }
    if let Some(v) = &a.factors {
        c.factors = Some(parse_factors(v));
    }
    if let Some(v) = a.hidden {
        c.hidden = v;
    }
    if let Some(v) = a.learning_rate {
        c.learning_rate = v;
    }
    if let Some(v) = a.epochs {
        c.epochs = v;
    }
    if let Some(v) = a.patience {
        c.patience = v;
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = &a.split {
        c.split = parse_split(v)?;
    }
    if let Some(v) = a.repeats {
        c.repeats = v;
    }
    if let Some(v) = a.jobs {
        c.jobs = v;
    }
    if let Some(v) = &a.out {
        c.out = Some(v.clone());
    }
    if c.jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    Ok(c)
}

struct Prepared {
    config: RunConfig,
    dataset: ScaleDataset,
    out: PathBuf,
}

fn prepare(a: &RunArgs) -> Result<Prepared> {
    let config = resolve(a)?;
    let data = config
        .data
        .clone()
        .ok_or_else(|| Error::Config("no data file (--data or `data =`)".into()))?;
    let out = config
        .out
        .clone()
        .ok_or_else(|| Error::Config("no output path (--out or `out =`)".into()))?;
    let dataset = load_dataset(&data, config.holidays.as_deref(), config.scale)?;
    Ok(Prepared {
        config,
        dataset,
        out,
    })
}

fn cmd_train(a: RunArgs) -> Result<()> {
    let Prepared {
        config,
        dataset,
        out,
    } = prepare(&a)?;
    let plan = config.plan()?;
    let fitted = fit_model(&plan, &dataset, config.seed)?;
    let bundle = ModelBundle {
        config: Document::new(&config, ()).config,
        feature_names: fitted.features.feature_names()?,
        features: fitted.features,
        norm: fitted.norm,
        network: fitted.report.final_params,
        epochs_run: fitted.report.epochs_run,
        best_val_loss: fitted.report.best_val_loss,
        test_metrics: fitted.metrics,
    };
    io::write_json(&out, &bundle)?;
    println!(
        "{} trained for {} epochs: test accuracy {:.3}%, test MSE {:.6} kWh²",
        plan.topology,
        bundle.epochs_run,
        bundle.test_metrics.accuracy_pct,
        bundle.test_metrics.mse_kwh2
    );
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let bundle: ModelBundle = io::read_json(&a.model)?;
    let dataset = load_dataset(&a.data, a.holidays.as_deref(), bundle.features.scale)?;
    let matrix = build_design_matrix(&dataset, &bundle.features)?;
    let x = bundle.norm.apply_x(&matrix.x)?;
    let predicted = bundle
        .norm
        .invert_target(&nn::predict(&bundle.network, &x)?);

    let mut csv = format!(
        "# model={}\nperiod_start,predicted_kwh,actual_kwh\n",
        a.model.display()
    );
    for ((t, p), y) in matrix.period_starts.iter().zip(&predicted).zip(&matrix.y) {
        csv.push_str(&format!("{},{p},{y}\n", format_hour(*t)));
    }
    io::write_text(&a.out, &csv)?;
    println!(
        "wrote {} predictions to {}",
        predicted.len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_sweep(a: RunArgs) -> Result<()> {
    let Prepared {
        config,
        dataset,
        out,
    } = prepare(&a)?;
    let result = lag_sweep(&dataset, &config.plan()?, &Pool::new(config.jobs))?;
    io::write_text(&out.join("sweep.csv"), &report::sweep_csv(&config, &result))?;
    io::write_json(&out.join("sweep.json"), &Document::new(&config, &result))?;
    println!(
        "{} sweep cells written to {}",
        result.cells.len(),
        out.display()
    );
    Ok(())
}

fn cmd_ablate(a: RunArgs) -> Result<()> {
    let Prepared {
        config,
        dataset,
        out,
    } = prepare(&a)?;
    let result = factor_ablation(&dataset, &config.plan()?, &Pool::new(config.jobs))?;
    io::write_text(
        &out.join("ablation.csv"),
        &report::ablation_csv(&config, &result),
    )?;
    io::write_json(&out.join("ablation.json"), &Document::new(&config, &result))?;
    println!(
        "baseline accuracy {:.3}%, {} factors ablated, written to {}",
        result.baseline.mean.accuracy_pct,
        result.drops.len(),
        out.display()
    );
    Ok(())
}

fn cmd_search(a: SearchArgs) -> Result<()> {
    let candidates = parse_candidates(&a.candidates)?;
    let Prepared {
        config,
        dataset,
        out,
    } = prepare(&a.run)?;
    let result = hidden_layer_search(
        &config.plan()?,
        &dataset,
        &candidates,
        &Pool::new(config.jobs),
    )?;
    io::write_text(
        &out.join("hidden.csv"),
        &report::hidden_csv(&config, &result),
    )?;
    io::write_json(&out.join("hidden.json"), &Document::new(&config, &result))?;
    println!(
        "best hidden size by MSE: {}, written to {}",
        result.best_by_mse,
        out.display()
    );
    Ok(())
}
