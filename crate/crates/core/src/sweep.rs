//! Parallel Monte Carlo sweeps with order-independent seeding.

use rayon::prelude::*;

use crate::error::Error;
use crate::rng::{hash_pair, hash_str, RngStream};
use crate::stats::SampleStats;

/// A sweep cell. The key identifies the cell in outputs; the stream key
/// selects its random streams. Cells sharing a stream key receive common
/// random numbers, which sharpens comparisons between agent settings.
pub trait SweepCell: Sync {
    fn cell_key(&self) -> String;

    fn stream_key(&self) -> String {
        self.cell_key()
    }
}

/// Stream id for trial `trial` of a cell whose stream key is `key`.
pub fn trial_stream_id(key: &str, trial: u64) -> u64 {
    hash_pair(hash_str(key), trial)
}

/// Named scalar results of one trial.
pub type Metrics = Vec<(String, f64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSummary {
    pub name: String,
    pub stats: SampleStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub key: String,
    /// Empty when every trial failed.
    pub metrics: Vec<MetricSummary>,
    pub errors: Vec<(u64, Error)>,
}

impl CellResult {
    pub fn is_missing(&self) -> bool {
        self.metrics.is_empty()
    }

    pub fn metric(&self, name: &str) -> Option<&SampleStats> {
        self.metrics.iter().find(|m| m.name == name).map(|m| &m.stats)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub cells: Vec<CellResult>,
}

impl SweepTable {
    pub fn cell(&self, key: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.key == key)
    }

    pub fn all_missing(&self) -> bool {
        self.cells.iter().all(CellResult::is_missing)
    }
}

/// Runs `trials` independent trials of every cell and summarizes each metric.
///
/// Trial `i` of a cell uses `RngStream::new(base_seed, trial_stream_id(stream_key, i))`,
/// so results do not depend on grid order, thread count or scheduling.
/// Failed trials are recorded on the cell and excluded from its statistics.
pub fn monte_carlo_sweep<C, R>(configs: &[C], trials: u64, base_seed: u64, run: R) -> SweepTable
where
    C: SweepCell,
    R: Fn(&C, u64, RngStream) -> Result<Metrics, Error> + Sync,
{
    let jobs: Vec<(usize, u64)> = (0..configs.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let keys: Vec<String> = configs.iter().map(SweepCell::stream_key).collect();
    let outcomes: Vec<Result<Metrics, Error>> = jobs
        .par_iter()
        .map(|&(c, t)| run(&configs[c], t, RngStream::new(base_seed, trial_stream_id(&keys[c], t))))
        .collect();

    let mut cells = Vec::with_capacity(configs.len());
    let mut outcomes = outcomes.into_iter();
    for cfg in configs {
        let mut names: Vec<String> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut errors = Vec::new();
        for t in 0..trials {
            match outcomes.next().expect("one outcome per job") {
                Ok(metrics) => {
                    for (k, (name, v)) in metrics.into_iter().enumerate() {
                        // trials normally report metrics in the same order
                        let slot =
                            if names.get(k) == Some(&name) { Some(k) } else { names.iter().position(|n| *n == name) };
                        match slot {
                            Some(i) => values[i].push(v),
                            None => {
                                names.push(name);
                                values.push(vec![v]);
                            }
                        }
                    }
                }
                Err(e) => errors.push((t, e)),
            }
        }
        let metrics = names
            .into_iter()
            .zip(values)
            .map(|(name, vs)| MetricSummary { name, stats: SampleStats::from_samples(&vs).expect("nonempty") })
            .collect();
        cells.push(CellResult { key: cfg.cell_key(), metrics, errors });
    }
    SweepTable { cells }
}
