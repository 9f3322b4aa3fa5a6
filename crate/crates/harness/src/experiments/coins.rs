use std::sync::Arc;

use contilab_core::envs::{sigmoid, CoinPrior};
use contilab_core::infotheory::regret_bound_logit;
use contilab_core::mdp::belief::{belief_value_iteration, reachable_beliefs, BeliefPolicy, CoinChoice};
use contilab_core::{
    monte_carlo_sweep, run_trajectory, run_trajectory_with, BitFlipAgent, BitFlipEnv, CoinSwapEnv,
    DyadicCoinBeliefAgent, LogitEnv, LogitPredictorAgent, RunOptions, SweepCell,
};

use super::{Experiment, FixedArm, DEFAULT_SEED};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{PlotSpec, Report, Value};

struct HorizonCell(u64);

impl SweepCell for HorizonCell {
    fn cell_key(&self) -> String {
        format!("horizon={}", self.0)
    }
}

pub struct LogitRegret;

impl Experiment for LogitRegret {
    fn name(&self) -> &'static str {
        "logit_regret"
    }

    fn about(&self) -> &'static str {
        "Average log-loss regret of the Bayesian logit predictor against its rate-distortion bound"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("trials", "2000"),
            ("sweep.horizon", "10,100"),
            ("agent.grid_points", "513"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        cfg.u64("seed")?;
        cfg.count("trials")?;
        if cfg.u64_list("sweep.horizon")?.contains(&0) {
            return Err(HarnessError::value("sweep.horizon", "horizons must be positive"));
        }
        if cfg.usize("agent.grid_points")? < 3 {
            return Err(HarnessError::value("agent.grid_points", "need at least 3 nodes"));
        }
        Ok(())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        self.validate(cfg)?;
        let points = cfg.usize("agent.grid_points")?;
        let cells: Vec<HorizonCell> = cfg.u64_list("sweep.horizon")?.into_iter().map(HorizonCell).collect();
        let table = monte_carlo_sweep(&cells, cfg.count("trials")?, cfg.u64("seed")?, |c, _, rng| {
            let mut env = LogitEnv::new();
            let mut agent = LogitPredictorAgent::new(points)?;
            let mut ones = 0u64;
            let s = run_trajectory_with(&mut env, &mut agent, c.0, &rng, RunOptions::default(), |r| {
                ones += u64::from(r.observation)
            })?;
            let p = sigmoid(env.theta());
            let n = c.0 as f64;
            let target = (ones as f64 * p.ln() + (n - ones as f64) * (1.0 - p).ln()) / n;
            Ok(vec![("regret".to_string(), target - s.average_reward)])
        });
        let mut r = Report::new(&["horizon"]);
        for (i, c) in cells.iter().enumerate() {
            r.push_cell(&table, i, vec![c.0.into()], &["regret"]);
            r.exact(vec![c.0.into()], "bound", regret_bound_logit::<f64>(c.0));
        }
        r.note_failures(&table);
        r.plot = Some(PlotSpec {
            title: "Logit predictor regret".into(),
            x: "horizon".into(),
            series: vec![],
            metrics: vec!["regret".into(), "bound".into()],
            log_x: true,
        });
        Ok(r)
    }
}

pub struct BitFlipDemo;

impl Experiment for BitFlipDemo {
    fn name(&self) -> &'static str {
        "bitflip_demo"
    }

    fn about(&self) -> &'static str {
        "One-bit agent on a bit stream with an unknown flip probability"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("trials", "1000"),
            ("horizon", "1000"),
            ("env.prior_a", "2"),
            ("env.prior_b", "1"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        cfg.u64("seed")?;
        cfg.count("trials")?;
        cfg.count("horizon")?;
        cfg.f64_in("env.prior_a", 1e-12, f64::MAX)?;
        cfg.f64_in("env.prior_b", 1e-12, f64::MAX)?;
        Ok(())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        self.validate(cfg)?;
        let (a, b) = (cfg.f64("env.prior_a")?, cfg.f64("env.prior_b")?);
        let horizon = cfg.count("horizon")?;
        let cells = [HorizonCell(horizon)];
        let table = monte_carlo_sweep(&cells, cfg.count("trials")?, cfg.u64("seed")?, |c, _, rng| {
            let mut env = BitFlipEnv::new(CoinPrior::Beta { a, b })?;
            let mut agent = BitFlipAgent::new(a / (a + b))?;
            let s = run_trajectory(&mut env, &mut agent, c.0, &rng)?;
            let p = env.flip_prob();
            // a predictor that knows p guesses the first bit blindly, then the likelier continuation
            let oracle = (0.5 + (c.0 - 1) as f64 * p.max(1.0 - p)) / c.0 as f64;
            Ok(vec![
                ("accuracy".to_string(), s.average_reward),
                ("oracle_accuracy".to_string(), oracle),
                ("regret".to_string(), oracle - s.average_reward),
            ])
        });
        let mut r = Report::new(&["horizon"]);
        r.push_cell(&table, 0, vec![horizon.into()], &["accuracy", "oracle_accuracy", "regret"]);
        r.note_failures(&table);
        Ok(r)
    }
}

pub struct CoinSwapBelief;

struct CoinParams {
    seed: u64,
    trials: u64,
    horizon: u64,
    p1: f64,
    q2s: Vec<f64>,
    gamma: f64,
    grid: usize,
}

impl CoinParams {
    fn read(c: &Config) -> Result<Self> {
        let p = Self {
            seed: c.u64("seed")?,
            trials: c.count("trials")?,
            horizon: c.count("horizon")?,
            p1: c.f64_in("env.p1", 0.0, 1.0)?,
            q2s: c.f64_list_in("sweep.q2", 0.0, 1.0)?,
            gamma: c.f64_in("planner.gamma", 1e-9, 1.0 - 1e-9)?,
            grid: c.usize("planner.grid")?,
        };
        if p.grid < 2 {
            return Err(HarnessError::value("planner.grid", "need at least 2 points"));
        }
        Ok(p)
    }
}

#[derive(Clone, Copy)]
enum Policy {
    Planner,
    Myopic,
    KnownOnly,
}

impl Policy {
    const ALL: [Policy; 3] = [Policy::Planner, Policy::Myopic, Policy::KnownOnly];

    fn label(self) -> &'static str {
        match self {
            Policy::Planner => "planner",
            Policy::Myopic => "myopic",
            Policy::KnownOnly => "known_only",
        }
    }
}

struct CoinCell {
    q2: f64,
    policy: Policy,
    plan: Option<Arc<BeliefPolicy<f64>>>,
}

impl SweepCell for CoinCell {
    fn cell_key(&self) -> String {
        format!("q2={} policy={}", self.q2, self.policy.label())
    }

    fn stream_key(&self) -> String {
        format!("q2={}", self.q2)
    }
}

fn swap_fraction(policy: &BeliefPolicy<f64>, idx: impl Iterator<Item = usize>) -> f64 {
    let (mut n, mut k) = (0usize, 0usize);
    for i in idx {
        n += 1;
        k += usize::from(policy.choice[i] == CoinChoice::Swapping);
    }
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

impl Experiment for CoinSwapBelief {
    fn name(&self) -> &'static str {
        "coinswap_belief"
    }

    fn about(&self) -> &'static str {
        "Belief-MDP planning in the two-coin game with a known coin and a swapping dyadic coin"
    }

    fn defaults(&self) -> Config {
        Config::from_pairs(&[
            ("seed", DEFAULT_SEED),
            ("trials", "200"),
            ("horizon", "10000"),
            ("env.p1", "0.8"),
            ("sweep.q2", "0.001,0.999"),
            ("planner.gamma", "0.999"),
            ("planner.grid", "2001"),
        ])
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        CoinParams::read(cfg).map(|_| ())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = CoinParams::read(cfg)?;
        let mut r = Report::new(&["q2", "policy"]);
        let mut cells = Vec::new();
        for &q2 in &p.q2s {
            let plan = match belief_value_iteration(p.p1, q2, p.gamma, p.grid) {
                Ok(plan) => {
                    let plan = Arc::new(plan);
                    let coords = vec![q2.into(), "planner".into()];
                    r.exact(coords.clone(), "swap_fraction_grid", swap_fraction(&plan, 0..p.grid));
                    let reach = reachable_beliefs(&plan, 0.5, q2);
                    r.exact(coords.clone(), "swap_fraction_reachable", swap_fraction(&plan, reach.iter().copied()));
                    r.exact(coords, "reachable_beliefs", reach.len() as f64);
                    Some(plan)
                }
                Err(e) => {
                    r.failures.push(format!("q2={q2} planner: {e}"));
                    r.push(vec![q2.into(), "planner".into()], "swap_fraction_grid", Value::Missing(e.to_string()));
                    None
                }
            };
            for policy in Policy::ALL {
                cells.push(CoinCell { q2, policy, plan: plan.clone() });
            }
        }
        let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, _, rng| {
            let mut env = CoinSwapEnv::new(vec![(CoinPrior::Fixed(p.p1), 0.0), (CoinPrior::dyadic(), c.q2)])?;
            let s = match c.policy {
                Policy::KnownOnly => run_trajectory(&mut env, &mut FixedArm { arm: 0, arms: 2 }, p.horizon, &rng)?,
                Policy::Myopic => {
                    run_trajectory(&mut env, &mut DyadicCoinBeliefAgent::new(p.p1, c.q2)?, p.horizon, &rng)?
                }
                Policy::Planner => {
                    let Some(plan) = &c.plan else {
                        return Err(contilab_core::Error::Numeric("no plan for this replacement rate".into()));
                    };
                    let mut agent = DyadicCoinBeliefAgent::new(p.p1, c.q2)?.with_policy(Arc::clone(plan));
                    run_trajectory(&mut env, &mut agent, p.horizon, &rng)?
                }
            };
            Ok(vec![("average_reward".to_string(), s.average_reward)])
        });
        for (i, c) in cells.iter().enumerate() {
            r.push_cell(&table, i, vec![c.q2.into(), c.policy.label().into()], &["average_reward"]);
        }
        r.note_failures(&table);
        Ok(r)
    }
}
