//! Experiment registry, configuration and output layer for contilab.
//!
//! Each registered experiment reproduces one study as `results.csv` with
//! per-cell means, standard deviations and 95% intervals, plus the fully
//! resolved configuration and an optional SVG plot.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod runner;
pub mod svg;

pub use config::Config;
pub use error::{HarnessError, Result};
pub use experiments::{find, list_experiments, registry, Experiment};
pub use report::{Coord, Report, Value};
pub use runner::{resolve, run_experiment, run_report, RunFlags};
