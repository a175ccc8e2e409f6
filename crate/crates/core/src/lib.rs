//! Data representations for hourly load time series and a forecasting
//! benchmark harness built around them.
//!
//! The crate is organised bottom-up:
//!
//! - [`ingest`] loads and validates hourly demand series from CSV.
//! - [`calendar`] encodes timestamps into the 8-component calendar vector.
//! - [`transforms`] holds the transformation catalog (reshaping, selection,
//!   aggregation, differences, convolution, rescaling, k-means, PCA) and the
//!   four history representations used by the benchmark.
//! - [`numerics`] is a small dense tensor engine with reverse-mode
//!   differentiation and Adam.
//! - [`models`] contains the linear baselines and the FCN / CNN / MLP
//!   forecasters, their training loop and checkpoint format.
//! - [`experiment`] assembles datasets, runs the seed grid and renders
//!   reports.
//! - [`cli`] wires everything into the `reprbench` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod calendar;
pub mod cli;
pub mod experiment;
pub mod ingest;
pub mod models;
pub mod numerics;
pub mod synthetic;
pub mod transforms;

pub use calendar::{encode_calendar, CalendarEncoder, CalendarVector, HolidayCalendar};

pub use ingest::{load_demand_csv, validate_hourly, IngestConfig, TimeSeries};
pub use transforms::{build_representation, ReprInput, ReprKind};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, Sample};
pub use models::{fit_linear, predict, train_model, Family, ModelSpec, TrainedModel};
