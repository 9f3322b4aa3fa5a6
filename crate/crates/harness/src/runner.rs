//! Resolves an experiment's configuration, runs it and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::experiments::{find, list_experiments, Experiment};
use crate::report::Report;
use crate::svg;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunFlags {
    pub plot: bool,
    pub dry_run: bool,
}

/// Looks up `name` and applies `overrides` on top of its defaults.
pub fn resolve(name: &str, overrides: &[(String, String)]) -> Result<(Box<dyn Experiment>, Config)> {
    let exp = find(name).ok_or_else(|| {
        HarnessError::Usage(format!("unknown experiment `{name}`; available: {}", list_experiments().join(", ")))
    })?;
    let mut cfg = exp.defaults();
    cfg.apply(overrides)?;
    exp.validate(&cfg)?;
    Ok((exp, cfg))
}

/// Runs an experiment in memory.
pub fn run_report(name: &str, overrides: &[(String, String)]) -> Result<(Config, Report)> {
    let (exp, cfg) = resolve(name, overrides)?;
    let report = exp.run(&cfg)?;
    Ok((cfg, report))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Runs `name` and writes `results.csv`, `config.resolved`, any extra tables
/// and, when requested, `plot.svg` into `out_dir`. A dry run only validates.
///
/// Returns the written paths. Fails after writing if every cell failed.
pub fn run_experiment(
    name: &str,
    overrides: &[(String, String)],
    out_dir: &Path,
    flags: RunFlags,
) -> Result<Vec<PathBuf>> {
    let (exp, cfg) = resolve(name, overrides)?;
    if flags.dry_run {
        return Ok(Vec::new());
    }
    let report = exp.run(&cfg)?;
    let seed = cfg.u64("seed")?;
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io { path: out_dir.to_path_buf(), source })?;

    let mut paths = vec![write(out_dir.join("results.csv"), &report.to_csv(name, seed))?];
    let header = format!("# experiment: {name}\n# version: contilab {}\n", env!("CARGO_PKG_VERSION"));
    paths.push(write(out_dir.join("config.resolved"), &(header + &cfg.render()))?);
    for (file, table) in &report.extra {
        paths.push(write(out_dir.join(file), &table.to_csv(name, seed))?);
    }
    if flags.plot {
        if let Some(svg) = svg::render(&report) {
            paths.push(write(out_dir.join("plot.svg"), &svg)?);
        }
    }
    if report.all_failed() {
        return Err(HarnessError::AllCellsFailed(name.to_string()));
    }
    Ok(paths)
}
