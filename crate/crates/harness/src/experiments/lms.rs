use rayon::prelude::*;

use contilab_core::agents::{IdbdMode, ShrinkageMode};
use contilab_core::infotheory::{
    default_future_horizon, delta_star, forgetting_error, implasticity_error, optimal_alpha, steady_cov,
};
use contilab_core::{
    monte_carlo_sweep, run_trajectory, run_trajectory_with, Ar1ScalarEnv, IdbdAgent, LmsAgent, Metrics, RunOptions,
    SweepCell,
};

use super::{argmin, unit_grid, Experiment, DEFAULT_SEED};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{Coord, PlotSpec, Report, Value};

pub struct LmsSweep;

struct LmsSweepParams {
    seed: u64,
    trials: u64,
    horizon: u64,
    eta: f64,
    zeta: f64,
    sigma: f64,
    mu0: f64,
    sigma0: f64,
    agent_eta: f64,
    alphas: Vec<f64>,
}

impl LmsSweepParams {
    fn read(c: &Config) -> Result<Self> {
        Ok(Self {
            seed: c.u64("seed")?,
            trials: c.count("trials")?,
            horizon: c.count("horizon")?,
            eta: c.f64_in("env.eta", 0.0, 1.0)?,
            zeta: c.f64_in("env.zeta", 0.0, f64::MAX)?,
            sigma: c.f64_in("env.sigma", 0.0, f64::MAX)?,
            mu0: c.f64("env.mu0")?,
            sigma0: c.f64_in("env.sigma0", 0.0, f64::MAX)?,
            agent_eta: c.f64_in("agent.eta", 0.0, 1.0)?,
            alphas: c.f64_list_in("sweep.alpha", 0.0, 1.0)?,
        })
    }
}

struct AlphaCell {
    alpha: f64,
    stream: &'static str,
}

impl SweepCell for AlphaCell {
    fn cell_key(&self) -> String {
        format!("alpha={}", self.alpha)
    }

    // every stepsize sees the same signal and noise
    fn stream_key(&self) -> String {
        self.stream.to_string()
    }
}

impl Experiment for LmsSweep {
    fn name(&self) -> &'static str {
        "fig2_lms_sweep"
    }

    fn about(&self) -> &'static str {
        "Average reward of the scalar LMS tracker as a function of its stepsize"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("trials", "200"),
            ("horizon", "10000"),
            ("env.eta", "0.9"),
            ("env.zeta", "0.5"),
            ("env.sigma", "1"),
            ("env.mu0", "0"),
            ("env.sigma0", "1"),
            ("agent.eta", "0.9"),
            ("sweep.alpha", "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        LmsSweepParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = LmsSweepParams::read(cfg)?;
        let cells: Vec<AlphaCell> = p.alphas.iter().map(|&alpha| AlphaCell { alpha, stream: self.name() }).collect();
        let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, _, rng| {
            let mut env = Ar1ScalarEnv::new(p.eta, p.zeta, p.sigma, p.mu0, p.sigma0)?;
            let mut agent = LmsAgent::new(c.alpha, p.agent_eta, ShrinkageMode::Shrunk)?;
            let s = run_trajectory(&mut env, &mut agent, p.horizon, &rng)?;
            Ok(vec![("average_reward".to_string(), s.average_reward)])
        });
        let mut r = Report::new(&["alpha"]);
        for (i, c) in cells.iter().enumerate() {
            r.push_cell(&table, i, vec![c.alpha.into()], &["average_reward"]);
        }
        r.note_failures(&table);
        r.plot = Some(PlotSpec {
            title: "LMS average reward vs stepsize".into(),
            x: "alpha".into(),
            series: vec![],
            metrics: vec!["average_reward".into()],
            log_x: false,
        });
        Ok(r)
    }
}

pub struct ErrorsVsAlpha;

struct ErrorsParams {
    sigma: f64,
    capacity: f64,
    etas: Vec<f64>,
    points: usize,
}

impl ErrorsParams {
    fn read(c: &Config) -> Result<Self> {
        c.u64("seed")?;
        let p = Self {
            sigma: c.f64_in("sigma", 1e-12, f64::MAX)?,
            capacity: c.f64_in("capacity", 1e-12, f64::MAX)?,
            etas: c.f64_list_in("etas", 1e-12, 1.0 - 1e-12)?,
            points: c.usize("alpha_points")?,
        };
        if p.points < 3 {
            return Err(HarnessError::value("alpha_points", "need at least 3 points"));
        }
        Ok(p)
    }
}

/// `(forgetting, implasticity)` of capacity-constrained LMS.
fn error_split(alpha: f64, eta: f64, sigma: f64, capacity: f64) -> contilab_core::Result<(f64, f64)> {
    let k = default_future_horizon(eta);
    Ok((forgetting_error(alpha, eta, sigma, capacity, k)?, implasticity_error(alpha, eta, sigma, capacity, k)?))
}

impl Experiment for ErrorsVsAlpha {
    fn name(&self) -> &'static str {
        "fig7_errors_vs_alpha"
    }

    fn about(&self) -> &'static str {
        "Closed-form forgetting and implasticity of capacity-constrained LMS versus stepsize"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("sigma", "0.5"),
            ("capacity", "2"),
            ("etas", "0.9,0.95,0.99"),
            ("alpha_points", "50"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        ErrorsParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = ErrorsParams::read(cfg)?;
        let n = p.points;
        let jobs: Vec<(f64, f64)> =
            p.etas.iter().flat_map(|&eta| (1..=n).map(move |i| (eta, i as f64 / n as f64))).collect();
        let out: Vec<_> = jobs.par_iter().map(|&(eta, a)| error_split(a, eta, p.sigma, p.capacity)).collect();
        let mut r = Report::new(&["eta", "alpha"]);
        for (&(eta, a), res) in jobs.iter().zip(out) {
            let coords = vec![Coord::from(eta), Coord::from(a)];
            match res {
                Ok((f, i)) => {
                    r.exact(coords.clone(), "forgetting", f);
                    r.exact(coords.clone(), "implasticity", i);
                    r.exact(coords, "total", f + i);
                }
                Err(e) => {
                    r.failures.push(format!("eta={eta} alpha={a}: {e}"));
                    for m in ["forgetting", "implasticity", "total"] {
                        r.push(coords.clone(), m, Value::Missing(e.to_string()));
                    }
                }
            }
        }
        r.plot = Some(PlotSpec {
            title: "Forgetting and implasticity vs stepsize".into(),
            x: "alpha".into(),
            series: vec!["eta".into()],
            metrics: vec!["forgetting".into(), "implasticity".into()],
            log_x: false,
        });
        Ok(r)
    }
}

pub struct OptimalAlpha;

struct OptimalParams {
    sigma: f64,
    etas: Vec<f64>,
    b_eta: f64,
    capacities: Vec<f64>,
    c_eta: f64,
    deltas: Vec<f64>,
    step: f64,
}

impl OptimalParams {
    fn read(c: &Config) -> Result<Self> {
        c.u64("seed")?;
        let step = c.f64_in("alpha_step", 1e-4, 0.5)?;
        Ok(Self {
            sigma: c.f64_in("sigma", 1e-12, f64::MAX)?,
            etas: c.f64_list_in("panel_a.etas", 1e-12, 1.0 - 1e-12)?,
            b_eta: c.f64_in("panel_b.eta", 1e-12, 1.0 - 1e-12)?,
            capacities: c.f64_list_in("panel_b.capacities", 1e-12, f64::MAX)?,
            c_eta: c.f64_in("panel_c.eta", 1e-12, 1.0 - 1e-12)?,
            deltas: c.f64_list_in("panel_c.deltas", 0.0, f64::MAX)?,
            step,
        })
    }
}

/// Grid minimizer of `f`, or the first error.
fn grid_argmin(grid: &[f64], f: impl Fn(f64) -> contilab_core::Result<f64> + Sync) -> contilab_core::Result<f64> {
    let vals = grid.par_iter().map(|&a| f(a)).collect::<contilab_core::Result<Vec<f64>>>()?;
    argmin(&vals).map(|i| grid[i]).ok_or_else(|| contilab_core::Error::Numeric("no finite error on the grid".into()))
}

impl Experiment for OptimalAlpha {
    fn name(&self) -> &'static str {
        "fig8_optimal_alpha"
    }

    fn about(&self) -> &'static str {
        "Error-minimizing stepsize versus eta, capacity and fixed quantization noise"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("sigma", "0.5"),
            ("alpha_step", "0.01"),
            ("panel_a.etas", "0.5,0.6,0.7,0.8,0.85,0.9,0.95,0.97,0.99"),
            ("panel_b.eta", "0.9"),
            ("panel_b.capacities", "0.25,0.5,1,2,4,8"),
            ("panel_c.eta", "0.9"),
            ("panel_c.deltas", "0,0.05,0.1,0.2,0.3,0.5,0.75,1"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        OptimalParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = OptimalParams::read(cfg)?;
        let grid = unit_grid(p.step);
        let blank = || Coord::text("");
        let mut r = Report::new(&["panel", "eta", "capacity", "delta"]);
        let record = |r: &mut Report, coords: Vec<Coord>, metric: &str, v: contilab_core::Result<f64>| match v {
            Ok(x) => r.exact(coords, metric, x),
            Err(e) => {
                r.failures.push(format!("{metric} at {coords:?}: {e}"));
                r.push(coords, metric, Value::Missing(e.to_string()));
            }
        };

        for &eta in &p.etas {
            record(&mut r, vec!["a".into(), eta.into(), blank(), blank()], "alpha_star", optimal_alpha(eta, p.sigma));
        }

        let reference = optimal_alpha(p.b_eta, p.sigma);
        for &cap in &p.capacities {
            let coords = vec!["b".into(), p.b_eta.into(), cap.into(), blank()];
            let best = grid_argmin(&grid, |a| error_split(a, p.b_eta, p.sigma, cap).map(|(f, i)| f + i));
            record(&mut r, coords.clone(), "alpha_star", best);
            record(&mut r, coords, "alpha_star_closed_form", reference.clone());
        }

        let k = default_future_horizon(p.c_eta);
        for &delta in &p.deltas {
            let coords = vec!["c".into(), p.c_eta.into(), blank(), delta.into()];
            let best = grid_argmin(&grid, |a| {
                let c = steady_cov(p.c_eta, p.sigma, a, delta)?;
                Ok(c.forgetting(k)? + c.implasticity(k)?)
            });
            record(&mut r, coords, "alpha_tilde", best);
        }
        Ok(r)
    }
}

pub struct Idbd;

struct IdbdParams {
    seed: u64,
    trials: u64,
    horizon: u64,
    eta: f64,
    sigma: f64,
    capacity: f64,
    zeta_meta: f64,
    alpha0: f64,
    trace_points: u64,
}

impl IdbdParams {
    fn read(c: &Config) -> Result<Self> {
        Ok(Self {
            seed: c.u64("seed")?,
            trials: c.count("trials")?,
            horizon: c.count("horizon")?,
            eta: c.f64_in("env.eta", 1e-12, 1.0 - 1e-12)?,
            sigma: c.f64_in("env.sigma", 1e-12, f64::MAX)?,
            capacity: c.f64_in("agent.capacity", 1e-12, f64::MAX)?,
            zeta_meta: c.f64_in("agent.zeta_meta", 0.0, f64::MAX)?,
            alpha0: c.f64_in("agent.alpha0", 1e-12, 1.0)?,
            trace_points: c.count("trace_points")?,
        })
    }
}

struct ModeCell {
    mode: IdbdMode<f64>,
    label: &'static str,
}

impl SweepCell for ModeCell {
    fn cell_key(&self) -> String {
        self.label.to_string()
    }

    fn stream_key(&self) -> String {
        "fig9_idbd".into()
    }
}

impl Experiment for Idbd {
    fn name(&self) -> &'static str {
        "fig9_idbd"
    }

    fn about(&self) -> &'static str {
        "Stepsize trajectories of capacity-constrained and standard IDBD"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("trials", "20"),
            ("horizon", "200000"),
            ("env.eta", "0.95"),
            ("env.sigma", "0.5"),
            ("agent.capacity", "0.5"),
            ("agent.zeta_meta", "0.01"),
            ("agent.alpha0", "0.1"),
            ("trace_points", "50"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        let p = IdbdParams::read(cfg)?;
        if p.trace_points > p.horizon {
            return Err(HarnessError::value("trace_points", "cannot exceed the horizon"));
        }
        Ok(())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        self.validate(cfg)?;
        let p = IdbdParams::read(cfg)?;
        let alpha_star = optimal_alpha(p.eta, p.sigma)?;
        let delta = delta_star(alpha_star, p.eta, p.sigma, p.capacity)?;
        let cells = [
            ModeCell {
                mode: IdbdMode::CapacityConstrained { eta: p.eta, sigma: p.sigma, capacity: p.capacity },
                label: "capacity",
            },
            ModeCell { mode: IdbdMode::Standard { delta }, label: "standard" },
        ];
        let wanted: Vec<u64> = (1..=p.trace_points).map(|j| j * p.horizon / p.trace_points).collect();
        let opts = RunOptions { record_series: false, record_diagnostics: true };
        let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, _, rng| {
            let mut env = Ar1ScalarEnv::stationary(p.eta, p.sigma)?;
            let mut agent = IdbdAgent::new(c.mode, p.zeta_meta, p.alpha0)?;
            let s = run_trajectory_with(&mut env, &mut agent, p.horizon, &rng, opts, |_| {})?;
            let series = s.diagnostics.get("alpha").map(Vec::as_slice).unwrap_or_default();
            let mut m: Metrics =
                checkpoints(series, &wanted).into_iter().map(|(t, a)| (format!("alpha@{t}"), a)).collect();
            let last = agent.alpha();
            m.push(("alpha_final".into(), last));
            m.push(("abs_gap".into(), (last - alpha_star).abs()));
            Ok(m)
        });

        let mut r = Report::new(&["mode", "t"]);
        for (i, c) in cells.iter().enumerate() {
            let cell = &table.cells[i];
            let times: Vec<u64> =
                cell.metrics.iter().filter_map(|m| m.name.strip_prefix("alpha@")?.parse().ok()).collect();
            for t in &times {
                r.push_metric(&table, i, vec![c.label.into(), (*t).into()], &format!("alpha@{t}"), "alpha");
            }
            if times.is_empty() {
                r.push_cell(&table, i, vec![c.label.into(), p.horizon.into()], &["alpha"]);
            }
            for m in ["alpha_final", "abs_gap"] {
                r.push_cell(&table, i, vec![c.label.into(), p.horizon.into()], &[m]);
            }
        }
        r.note_failures(&table);
        r.exact(vec!["reference".into(), p.horizon.into()], "alpha_star", alpha_star);
        r.exact(vec!["reference".into(), p.horizon.into()], "delta_star", delta);
        r.plot = Some(PlotSpec {
            title: "IDBD stepsize".into(),
            x: "t".into(),
            series: vec!["mode".into()],
            metrics: vec!["alpha".into()],
            log_x: false,
        });
        Ok(r)
    }
}

/// For each wanted time, the last recorded point at or before it.
fn checkpoints(series: &[(u64, f64)], wanted: &[u64]) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::with_capacity(wanted.len());
    for &w in wanted {
        let k = series.partition_point(|&(t, _)| t <= w);
        if k > 0 && out.last().is_none_or(|l| l.0 != series[k - 1].0) {
            out.push(series[k - 1]);
        }
    }
    out
}
