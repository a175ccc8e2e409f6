//! Dataset assembly, year splits, metrics, the seed-grid runner and report
//! rendering.

mod dataset;
mod metrics;
mod report;
mod runner;

pub use dataset::{build_sample, make_dataset, split_by_year, HistoryPolicy, Sample, Split, SplitYears};
pub use metrics::{mae, mean_std, relative_advantage, MetricError};
pub use report::{
    parse_aggregate_csv, parse_baselines_csv, parse_runs_csv, render_aggregate_csv, render_baselines_csv,
    render_markdown, render_report, render_runs_csv, AggregateRow, BaselineRow, ExperimentReport, ReportFormat,
    ReportParseError, RunResult, AGGREGATE_HEADER, BASELINES_HEADER, RUNS_HEADER,
};
pub use runner::{run_experiment, run_experiment_with_progress, ExperimentConfig, ExperimentError, Progress};
