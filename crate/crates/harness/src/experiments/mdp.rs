use std::sync::Arc;

use rayon::prelude::*;

use contilab_core::envs::{DriftSchedule, GoalMdpParams};
use contilab_core::sweep::trial_stream_id;
use contilab_core::{
    monte_carlo_sweep, run_trajectory, GoalMdpEnv, OptimisticQAgent, RngStream, StreamRole, SweepCell, SweepTable,
};

use super::{argmax, Experiment, DEFAULT_SEED};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{PlotSpec, Report, Value};

struct GridParams {
    seed: u64,
    trials: u64,
    horizon: u64,
    states: usize,
    actions: usize,
    scale_gamma: f64,
    gamma: f64,
    etas: Vec<f64>,
    alphas: Vec<f64>,
    zetas: Vec<f64>,
}

impl GridParams {
    fn read(c: &Config) -> Result<Self> {
        let p = Self {
            seed: c.u64("seed")?,
            trials: c.count("trials")?,
            horizon: c.count("horizon")?,
            states: c.count("env.states")? as usize,
            actions: c.count("env.actions")? as usize,
            scale_gamma: c.f64_in("env.gamma", 1e-9, 1.0 - 1e-9)?,
            gamma: c.f64_in("agent.gamma", 0.0, 1.0 - 1e-9)?,
            etas: c.f64_list_in("sweep.eta", 0.0, 1.0)?,
            alphas: c.f64_list_in("sweep.alpha", 0.0, 1.0)?,
            zetas: c.f64_list_in("sweep.zeta", 0.0, f64::MAX)?,
        };
        if p.states < 2 {
            return Err(HarnessError::value("env.states", "need at least two states"));
        }
        Ok(p)
    }

    fn env(&self, eta: f64) -> GoalMdpParams<f64> {
        GoalMdpParams {
            states: self.states,
            actions: self.actions,
            resample_prob: eta,
            goal: 0,
            gamma: self.scale_gamma,
        }
    }
}

fn grid_defaults() -> Config {
    Config::from_pairs(&[
        ("seed", DEFAULT_SEED),
        ("trials", "8"),
        ("horizon", "250000"),
        ("env.states", "10"),
        ("env.actions", "3"),
        ("env.gamma", "0.9"),
        ("agent.gamma", "0.9"),
        ("sweep.eta", "0.0001,0.001"),
        ("sweep.alpha", "0.025,0.05,0.1,0.15,0.2,0.3,0.4,0.6,0.8"),
        ("sweep.zeta", "0.00001,0.00005,0.0001,0.0002,0.0004,0.0006,0.01"),
    ])
}

struct GridCell {
    eta: f64,
    alpha: f64,
    zeta: f64,
}

impl SweepCell for GridCell {
    fn cell_key(&self) -> String {
        format!("eta={} alpha={} zeta={}", self.eta, self.alpha, self.zeta)
    }

    // all agents at one drift rate face the same sequence of MDPs
    fn stream_key(&self) -> String {
        stream_key(self.eta)
    }
}

fn stream_key(eta: f64) -> String {
    format!("goal_mdp eta={eta}")
}

struct Grid {
    cells: Vec<GridCell>,
    table: SweepTable,
}

impl Grid {
    fn index(&self, p: &GridParams, e: usize, a: usize, z: usize) -> usize {
        (e * p.alphas.len() + a) * p.zetas.len() + z
    }

    fn mean(&self, i: usize) -> f64 {
        self.table.cells[i].metric("average_reward").map_or(f64::NAN, |s| s.mean)
    }
}

/// Runs every `(η, α, ζ)` cell. Each `(η, trial)` drift history is recorded
/// once and replayed for all agents.
fn run_grid(p: &GridParams) -> Result<Grid> {
    let schedule_jobs: Vec<(usize, u64)> = (0..p.etas.len()).flat_map(|e| (0..p.trials).map(move |t| (e, t))).collect();
    let schedules: Vec<contilab_core::Result<Arc<DriftSchedule<f64>>>> = schedule_jobs
        .par_iter()
        .map(|&(e, t)| {
            let eta = p.etas[e];
            let trial = RngStream::new(p.seed, trial_stream_id(&stream_key(eta), t));
            DriftSchedule::generate(p.env(eta), p.horizon, &trial.child(StreamRole::EnvNoise)).map(Arc::new)
        })
        .collect();

    let mut cells = Vec::new();
    for &eta in &p.etas {
        for &alpha in &p.alphas {
            for &zeta in &p.zetas {
                cells.push(GridCell { eta, alpha, zeta });
            }
        }
    }
    let eta_index = |eta: f64| p.etas.iter().position(|&x| x == eta).expect("eta from the grid");
    let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, t, rng| {
        let schedule = match &schedules[eta_index(c.eta) * p.trials as usize + t as usize] {
            Ok(s) => Arc::clone(s),
            Err(e) => return Err(e.clone()),
        };
        let mut env = GoalMdpEnv::replay(schedule);
        let mut agent = OptimisticQAgent::new(p.states, p.actions, c.alpha, p.gamma, c.zeta)?;
        let s = run_trajectory(&mut env, &mut agent, p.horizon, &rng)?;
        Ok(vec![("average_reward".to_string(), s.average_reward)])
    });
    Ok(Grid { cells, table })
}

fn grid_report(g: &Grid) -> Report {
    let mut r = Report::new(&["eta", "alpha", "zeta"]);
    for (i, c) in g.cells.iter().enumerate() {
        r.push_cell(&g.table, i, vec![c.eta.into(), c.alpha.into(), c.zeta.into()], &["average_reward"]);
    }
    r.note_failures(&g.table);
    r
}

/// Best cell along one axis for every value of the other.
fn best_profile(p: &GridParams, g: &Grid, by_alpha: bool) -> Report {
    let (axis, other, vals, others) = if by_alpha {
        ("alpha", "best_zeta", &p.alphas, &p.zetas)
    } else {
        ("zeta", "best_alpha", &p.zetas, &p.alphas)
    };
    let mut r = Report::new(&["eta", axis]);
    for (e, &eta) in p.etas.iter().enumerate() {
        for (v, &x) in vals.iter().enumerate() {
            let idx: Vec<usize> =
                (0..others.len()).map(|o| if by_alpha { g.index(p, e, v, o) } else { g.index(p, e, o, v) }).collect();
            let means: Vec<f64> = idx.iter().map(|&i| g.mean(i)).collect();
            let coords = vec![eta.into(), x.into()];
            match argmax(&means) {
                Some(k) => {
                    r.push_cell(&g.table, idx[k], coords.clone(), &["average_reward"]);
                    r.exact(coords, other, others[k]);
                }
                None => {
                    let msg = "every cell failed".to_string();
                    r.push(coords.clone(), "average_reward", Value::Missing(msg.clone()));
                    r.push(coords, other, Value::Missing(msg));
                }
            }
        }
    }
    r.note_failures(&g.table);
    r.plot = Some(PlotSpec {
        title: format!("Best average reward vs {axis}"),
        x: axis.into(),
        series: vec!["eta".into()],
        metrics: vec!["average_reward".into()],
        log_x: true,
    });
    r
}

fn run_profile(cfg: &Config, by_alpha: bool) -> Result<Report> {
    let p = GridParams::read(cfg)?;
    let g = run_grid(&p)?;
    let mut r = best_profile(&p, &g, by_alpha);
    r.extra.push(("grid.csv".into(), grid_report(&g)));
    Ok(r)
}

pub struct MdpAlpha;

impl Experiment for MdpAlpha {
    fn name(&self) -> &'static str {
        "fig15_mdp_alpha"
    }

    fn about(&self) -> &'static str {
        "Optimistic Q-learning on a drifting goal MDP: best average reward per stepsize"
    }

    fn defaults(&self) -> Config {
        grid_defaults()
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        GridParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        run_profile(cfg, true)
    }
}

pub struct MdpBoost;

impl Experiment for MdpBoost {
    fn name(&self) -> &'static str {
        "fig16_mdp_boost"
    }

    fn about(&self) -> &'static str {
        "Optimistic Q-learning on a drifting goal MDP: best average reward per optimistic boost"
    }

    fn defaults(&self) -> Config {
        grid_defaults()
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        GridParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        run_profile(cfg, false)
    }
}
