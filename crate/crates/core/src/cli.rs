//! Command-line interface of the `reprbench` binary.
//!
//! Settings are resolved in three layers: command-line flags override the
//! TOML file given with `--config`, which overrides the built-in defaults.
//! Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::calendar::{load_holidays, HolidayCalendar, DEFAULT_TZ_OFFSET_HOURS};
use crate::experiment::{
    parse_aggregate_csv, parse_baselines_csv, render_aggregate_csv, render_baselines_csv, render_markdown,
    render_runs_csv, run_experiment_with_progress, ExperimentConfig, ExperimentReport, HistoryPolicy, Progress,
    SplitYears,
};
use crate::ingest::{load_hourly_series, parse_utc_timestamp, write_demand_csv, IngestConfig, TimeSeries};
use crate::models::Family;
use crate::synthetic::{synthetic_demand, SyntheticConfig};
use crate::transforms::{build_representation_with, ReprKind, ReprLayout};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "reprbench", version, about = "Hourly load representations and forecasting benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the representation × horizon × seed grid and write reports.
    Run(RunArgs),
    /// Print one representation of the history at an origin as CSV.
    Inspect(InspectArgs),
    /// Re-render the CSVs of a finished run as a markdown table.
    Report(ReportArgs),
    /// Write a synthetic demand series in the loader's CSV layout.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Hourly demand CSV with a `utc_timestamp` column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Holiday list, one YYYY-MM-DD per line [default: bundled German list].
    #[arg(long)]
    pub holidays: Option<PathBuf>,
    /// Demand column [default: DE_load_actual_entsoe_transparency].
    #[arg(long)]
    pub column: Option<String>,
    /// Factor converting the column to GW [default: 0.001].
    #[arg(long)]
    pub unit_scale: Option<f64>,
    /// Fixed offset of local time from UTC, in hours [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub tz_offset_hours: Option<i32>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// TOML file with defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: results].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Representations, comma-separated [default: all four].
    #[arg(long, value_delimiter = ',')]
    pub repr: Option<Vec<ReprKind>>,
    /// Forecast horizons in hours [default: 1,24,168].
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    /// Seeds, e.g. `1-10` or `1,4,7` [default: 1-10].
    #[arg(long)]
    pub seeds: Option<String>,
    /// Worker threads [default: 1].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Network for the vector representations [default: fcn].
    #[arg(long, value_enum)]
    pub model: Option<VectorModel>,
    /// FCN widths from history to latent [default: 128,64].
    #[arg(long, value_delimiter = ',')]
    pub fcn_hidden: Option<Vec<usize>>,
    /// FCN widths after the calendar join [default: 32].
    #[arg(long, value_delimiter = ',')]
    pub fcn_head: Option<Vec<usize>>,
    /// CNN filter counts per convolution [default: 16,32].
    #[arg(long, value_delimiter = ',')]
    pub cnn_filters: Option<Vec<usize>>,
    /// CNN square kernel side [default: 3].
    #[arg(long)]
    pub cnn_kernel: Option<usize>,
    /// CNN dense widths after flattening [default: 128,64,32].
    #[arg(long, value_delimiter = ',')]
    pub cnn_hidden: Option<Vec<usize>>,
    /// Adam learning rate [default: 0.001].
    #[arg(long)]
    pub lr: Option<f64>,
    /// Maximum epochs [default: 200].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Mini-batch size [default: 64].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Epochs without validation improvement before stopping [default: 10].
    #[arg(long)]
    pub patience: Option<usize>,
    /// Training years, `YYYY` or `YYYY-YYYY` [default: 2015-2017].
    #[arg(long)]
    pub train_years: Option<String>,
    /// Validation years [default: 2018].
    #[arg(long)]
    pub val_years: Option<String>,
    /// Test years [default: 2019].
    #[arg(long)]
    pub test_years: Option<String>,
    /// Targets without full history: drop them or fail [default: drop].
    #[arg(long, value_enum)]
    pub history: Option<HistoryArg>,
    /// Skip the two linear baselines.
    #[arg(long)]
    pub no_baselines: bool,
    /// Do not print per-run progress to stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorModel {
    Fcn,
    Mlp10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistoryArg {
    Drop,
    Strict,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Forecast origin, e.g. 2019-03-18T00:00 (UTC).
    #[arg(long)]
    pub origin: String,
    #[arg(long, default_value = "naive")]
    pub repr: ReprKind,
    /// Difference lag for the differenced representations.
    #[arg(long, default_value_t = 1)]
    pub horizon: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Directory holding aggregate.csv (and optionally baselines.csv).
    #[arg(long, default_value = "results")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// First timestamp (UTC) [default: 2014-12-01T00:00].
    #[arg(long)]
    pub start: Option<String>,
    /// Number of hours [default: through 2019].
    #[arg(long)]
    pub hours: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// AR(1) innovation std in GW.
    #[arg(long)]
    pub noise: Option<f64>,
}

/// Contents of a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub holidays: Option<PathBuf>,
    pub column: Option<String>,
    pub unit_scale: Option<f64>,
    pub tz_offset_hours: Option<i32>,
    pub out: Option<PathBuf>,
    pub representations: Option<Vec<String>>,
    pub horizons: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    pub jobs: Option<usize>,
    pub model: Option<VectorModel>,
    pub fcn_hidden: Option<Vec<usize>>,
    pub fcn_head: Option<Vec<usize>>,
    pub cnn_filters: Option<Vec<usize>>,
    pub cnn_kernel: Option<usize>,
    pub cnn_hidden: Option<Vec<usize>>,
    pub lr: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub patience: Option<usize>,
    pub train_years: Option<String>,
    pub val_years: Option<String>,
    pub test_years: Option<String>,
    pub history: Option<HistoryArg>,
    pub baselines: Option<bool>,
}

/// Fully resolved settings of a `run` invocation.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub data_path: PathBuf,
    pub holidays_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub ingest: IngestConfig,
    pub experiment: ExperimentConfig,
}

/// `YYYY` or `YYYY-YYYY`.
pub fn parse_year_range(s: &str) -> Result<(i32, i32), String> {
    let bad = || format!("invalid year range `{s}` (expected YYYY or YYYY-YYYY)");
    let (a, b) = match s.trim().split_once('-') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), s.trim()),
    };
    let a: i32 = a.parse().map_err(|_| bad())?;
    let b: i32 = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Comma-separated seeds and inclusive `a-b` ranges, e.g. `1-3,7`.
pub fn parse_seed_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("invalid seed `{part}`");
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err("seed list is empty".into());
    }
    Ok(out)
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn ingest_config(data: &DataArgs, file: &FileConfig) -> IngestConfig {
    let mut cfg = IngestConfig::default();
    if let Some(c) = data.column.clone().or_else(|| file.column.clone()) {
        cfg.column_name = c;
    }
    if let Some(u) = data.unit_scale.or(file.unit_scale) {
        cfg.unit_scale = u;
    }
    cfg
}

impl CliConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        let usage = CliError::Usage;
        let data_path = args
            .data
            .data
            .clone()
            .or_else(|| file.data.clone())
            .ok_or_else(|| usage("--data is required (or `data` in the config file)".into()))?;
        let mut e = ExperimentConfig::default();
        if let Some(r) = args.repr.clone() {
            e.representations = r;
        } else if let Some(r) = &file.representations {
            e.representations = r.iter().map(|s| s.parse()).collect::<Result<_, String>>().map_err(usage)?;
        }
        if let Some(h) = args.horizons.clone().or_else(|| file.horizons.clone()) {
            e.horizons = h;
        }
        if let Some(s) = &args.seeds {
            e.seeds = parse_seed_list(s).map_err(usage)?;
        } else if let Some(s) = &file.seeds {
            e.seeds = s.clone();
        }
        e.jobs = args.jobs.or(file.jobs).unwrap_or(1);
        e.vector_family = match args.model.or(file.model).unwrap_or(VectorModel::Fcn) {
            VectorModel::Fcn => Family::Fcn,
            VectorModel::Mlp10 => Family::Mlp10,
        };
        let pick = |flag: &Option<Vec<usize>>, file: &Option<Vec<usize>>, default: &mut Vec<usize>| {
            if let Some(v) = flag.clone().or_else(|| file.clone()) {
                *default = v;
            }
        };
        pick(&args.fcn_hidden, &file.fcn_hidden, &mut e.arch.fcn_encoder);
        pick(&args.fcn_head, &file.fcn_head, &mut e.arch.fcn_head);
        pick(&args.cnn_filters, &file.cnn_filters, &mut e.arch.cnn_filters);
        pick(&args.cnn_hidden, &file.cnn_hidden, &mut e.arch.cnn_head);
        if let Some(k) = args.cnn_kernel.or(file.cnn_kernel) {
            e.arch.cnn_kernel = k;
        }
        if let Some(v) = args.lr.or(file.lr) {
            e.training.lr = v;
        }
        if let Some(v) = args.epochs.or(file.epochs) {
            e.training.max_epochs = v;
        }
        if let Some(v) = args.batch_size.or(file.batch_size) {
            e.training.batch_size = v;
        }
        if let Some(v) = args.patience.or(file.patience) {
            e.training.patience = v;
        }
        let years = |flag: &Option<String>, file: &Option<String>, default: (i32, i32)| {
            flag.as_ref().or(file.as_ref()).map_or(Ok(default), |s| parse_year_range(s))
        };
        let d = SplitYears::default();
        e.splits = SplitYears {
            train: years(&args.train_years, &file.train_years, d.train).map_err(usage)?,
            val: years(&args.val_years, &file.val_years, d.val).map_err(usage)?,
            test: years(&args.test_years, &file.test_years, d.test).map_err(usage)?,
        };
        e.history_policy = match args.history.or(file.history).unwrap_or(HistoryArg::Drop) {
            HistoryArg::Drop => HistoryPolicy::DropUncovered,
            HistoryArg::Strict => HistoryPolicy::Strict,
        };
        e.baselines = !args.no_baselines && file.baselines.unwrap_or(true);
        e.tz_offset_hours = args.data.tz_offset_hours.or(file.tz_offset_hours).unwrap_or(DEFAULT_TZ_OFFSET_HOURS);
        e.validate().map_err(usage)?;
        for repr in &e.representations {
            for &h in &e.horizons {
                e.spec_for(*repr, h).validate().map_err(|err| usage(err.to_string()))?;
            }
        }

        let mut ingest = ingest_config(&args.data, &file);
        let (first, _) = e.splits.bounds(crate::experiment::Split::Train);
        let (_, last) = e.splits.bounds(crate::experiment::Split::Test);
        let lookback = e.layout.window + 2 * e.horizons.iter().max().copied().unwrap_or(0);
        ingest.start = first - chrono::Duration::hours(lookback as i64);
        ingest.end = last - chrono::Duration::hours(1);
        Ok(Self {
            data_path,
            holidays_path: args.data.holidays.clone().or(file.holidays),
            output_dir: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("results")),
            ingest,
            experiment: e,
        })
    }
}

fn load_series(path: &Path, cfg: &IngestConfig) -> Result<TimeSeries, CliError> {
    load_hourly_series(path, cfg).map_err(|e| CliError::Runtime(format!("ingest: {}: {e}", path.display())))
}

fn holidays(path: Option<&Path>) -> Result<HolidayCalendar, CliError> {
    match path {
        Some(p) => load_holidays(p).map_err(|e| CliError::Runtime(format!("calendar: {}: {e}", p.display()))),
        None => Ok(HolidayCalendar::bundled_german()),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn cmd_run(args: &RunArgs) -> Result<ExperimentReport, CliError> {
    let cfg = CliConfig::resolve(args)?;
    let ts = load_series(&cfg.data_path, &cfg.ingest)?;
    let hol = holidays(cfg.holidays_path.as_deref())?;
    let quiet = args.quiet;
    let progress = move |p: &Progress| {
        if quiet {
            return;
        }
        match p {
            Progress::Baseline(b) => eprintln!(
                "baseline h={:>3}: linear naive {:.4} GW, linear naive differences {:.4} GW",
                b.horizon, b.naive_mae, b.differences_mae
            ),
            Progress::Run(r) => eprintln!(
                "{:<20} h={:>3} seed={:>2}: test MAE {:.4} GW (best val {:.4}, {} epochs)",
                r.repr, r.horizon, r.seed, r.test_mae, r.best_val_mae, r.epochs
            ),
        }
    };
    let report = run_experiment_with_progress(&cfg.experiment, &ts, &hol, &progress).map_err(runtime)?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    write(&out.join("runs.csv"), &render_runs_csv(&report))?;
    write(&out.join("aggregate.csv"), &render_aggregate_csv(&report))?;
    write(&out.join("baselines.csv"), &render_baselines_csv(&report))?;
    write(&out.join("report.md"), &render_markdown(&report))?;
    if !quiet {
        eprintln!("wrote {}", out.display());
    }
    Ok(report)
}

/// The representation at `args.origin` as CSV: one line of values for
/// vector kinds, one line per day for matrix kinds.
pub fn cmd_inspect(args: &InspectArgs) -> Result<String, CliError> {
    let data_path = args.data.data.clone().ok_or_else(|| CliError::Usage("--data is required".into()))?;
    let origin = parse_utc_timestamp(&args.origin)
        .ok_or_else(|| CliError::Usage(format!("cannot parse origin `{}`", args.origin)))?;
    let mut ingest = ingest_config(&args.data, &FileConfig::default());
    ingest.start = chrono::DateTime::<chrono::Utc>::MIN_UTC;
    ingest.end = chrono::DateTime::<chrono::Utc>::MAX_UTC;
    let ts = load_series(&data_path, &ingest)?;
    let k = ts
        .index_of(origin)
        .ok_or_else(|| CliError::Runtime(format!("origin {origin} is outside the series")))?;
    let layout = ReprLayout::default();
    let repr = build_representation_with(ts.values(), k, args.repr, args.horizon, layout)
        .map_err(|e| CliError::Runtime(format!("transforms: {e}")))?;
    let row = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    match repr.as_matrix() {
        Some(m) => {
            for r in 0..m.rows() {
                out.push_str(&row(m.row(r)));
                out.push('\n');
            }
        }
        None => {
            out.push_str(&row(&repr.data));
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn cmd_report(args: &ReportArgs) -> Result<String, CliError> {
    let read = |name: &str| {
        let p = args.input.join(name);
        fs::read_to_string(&p).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
    };
    let aggregates = parse_aggregate_csv(&read("aggregate.csv")?).map_err(|e| runtime(format!("aggregate.csv: {e}")))?;
    let baselines = if args.input.join("baselines.csv").exists() {
        parse_baselines_csv(&read("baselines.csv")?).map_err(|e| runtime(format!("baselines.csv: {e}")))?
    } else {
        Vec::new()
    };
    let report = ExperimentReport { runs: Vec::new(), aggregates, baselines };
    let text = match args.format {
        FormatArg::Markdown => render_markdown(&report),
        FormatArg::Csv => render_aggregate_csv(&report),
    };
    if let Some(p) = &args.out {
        write(p, &text)?;
        return Ok(String::new());
    }
    Ok(text)
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let mut cfg = SyntheticConfig { seed: args.seed, ..SyntheticConfig::default() };
    if let Some(s) = &args.start {
        cfg.start = parse_utc_timestamp(s).ok_or_else(|| CliError::Usage(format!("cannot parse start `{s}`")))?;
    }
    if let Some(h) = args.hours {
        cfg.hours = h;
    }
    if let Some(n) = args.noise {
        cfg.noise_std = n;
    }
    let ts = synthetic_demand(&cfg, &HolidayCalendar::bundled_german());
    let f = fs::File::create(&args.out).map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    let d = IngestConfig::default();
    write_demand_csv(std::io::BufWriter::new(f), &ts, &d.column_name, d.unit_scale)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| ()),
        Command::Inspect(a) => cmd_inspect(a).map(|s| print!("{s}")),
        Command::Report(a) => cmd_report(a).map(|s| print!("{s}")),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(extra: &[&str]) -> RunArgs {
        let mut argv = vec!["reprbench", "run", "--data", "x.csv"];
        argv.extend_from_slice(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Run(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_are_the_full_grid() {
        let c = CliConfig::resolve(&run_args(&[])).unwrap();
        assert_eq!(c.experiment.representations.len(), 4);
        assert_eq!(c.experiment.horizons, vec![1, 24, 168]);
        assert_eq!(c.experiment.seeds, (1..=10).collect::<Vec<_>>());
        assert_eq!(c.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        fs::write(&p, "horizons = [24]\nseeds = [3, 4]\nlr = 0.01\nrepresentations = [\"reshaped\"]\n").unwrap();
        let c = CliConfig::resolve(&run_args(&["--config", p.to_str().unwrap(), "--seeds", "1-2"])).unwrap();
        assert_eq!(c.experiment.horizons, vec![24]);
        assert_eq!(c.experiment.seeds, vec![1, 2]);
        assert_eq!(c.experiment.training.lr, 0.01);
        assert_eq!(c.experiment.representations, vec![ReprKind::Reshaped]);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        fs::write(&p, "learning_rate = 0.1\n").unwrap();
        let e = CliConfig::resolve(&run_args(&["--config", p.to_str().unwrap()])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_seed_list("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_seed_list("3-1").is_err());
        assert!(parse_seed_list("").is_err());
        assert_eq!(parse_year_range("2015-2017").unwrap(), (2015, 2017));
        assert_eq!(parse_year_range("2019").unwrap(), (2019, 2019));
        assert!(parse_year_range("20x9").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with_args(["reprbench", "run", "--horizons", "abc"]), 2);
        assert_eq!(main_with_args(["reprbench", "frobnicate"]), 2);
        assert_eq!(main_with_args(["reprbench", "run"]), 2);
        assert_eq!(main_with_args(["reprbench", "run", "--data", "x.csv", "--horizons", "0"]), 2);
    }

    #[test]
    fn overlapping_years_rejected() {
        let e = CliConfig::resolve(&run_args(&["--val-years", "2017"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
