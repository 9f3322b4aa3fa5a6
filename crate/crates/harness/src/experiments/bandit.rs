use contilab_core::agents::ArmPosterior;
use contilab_core::sim::thinning_stride;
use contilab_core::{
    monte_carlo_sweep, run_trajectory_with, GaussianAr1BanditEnv, Metrics, PsAgent, RngStream, RunOptions, SweepCell,
    TsAgent,
};

use super::{Experiment, Flagged, DEFAULT_SEED};
use crate::config::Config;
use crate::error::Result;
use crate::report::{Coord, PlotSpec, Report};

struct BanditParams {
    seed: u64,
    trials: u64,
    horizon: u64,
    arms: usize,
    sigma: f64,
}

impl BanditParams {
    fn read(c: &Config) -> Result<Self> {
        let arms = c.count("env.arms")? as usize;
        Ok(Self {
            seed: c.u64("seed")?,
            trials: c.count("trials")?,
            horizon: c.count("horizon")?,
            arms,
            sigma: c.f64_in("env.sigma", 0.0, f64::MAX)?,
        })
    }
}

/// Per-step rewards and greedy flags of one agent.
struct Path {
    rewards: Vec<f64>,
    greedy: Vec<bool>,
}

fn run_agent(ps: bool, eta: f64, p: &BanditParams, rng: &RngStream) -> contilab_core::Result<Path> {
    let mut env = GaussianAr1BanditEnv::stationary(p.arms, eta, p.sigma)?;
    let post = ArmPosterior::stationary(p.arms, eta, p.sigma)?;
    let mut rewards = Vec::with_capacity(p.horizon as usize);
    let opts = RunOptions::default();
    let greedy = if ps {
        let mut agent = Flagged::new(PsAgent::new(post), |a: &PsAgent| a.last_action_greedy());
        run_trajectory_with(&mut env, &mut agent, p.horizon, rng, opts, |s| rewards.push(s.reward))?;
        agent.flags
    } else {
        let mut agent = Flagged::new(TsAgent::new(post), |a: &TsAgent| a.last_action_greedy());
        run_trajectory_with(&mut env, &mut agent, p.horizon, rng, opts, |s| rewards.push(s.reward))?;
        agent.flags
    };
    Ok(Path { rewards, greedy })
}

/// Running means of rewards and greedy flags at every `stride` steps and at the end.
fn running_means(path: &Path, stride: u64) -> Vec<(u64, f64, f64)> {
    let (mut r, mut g) = (0.0, 0.0);
    let mut out = Vec::new();
    let n = path.rewards.len() as u64;
    for (i, (&x, &flag)) in path.rewards.iter().zip(&path.greedy).enumerate() {
        r += x;
        g += if flag { 1.0 } else { 0.0 };
        let t = i as u64 + 1;
        if t.is_multiple_of(stride) || t == n {
            out.push((t, r / t as f64, g / t as f64));
        }
    }
    out
}

struct EtaCell {
    eta: f64,
}

impl SweepCell for EtaCell {
    fn cell_key(&self) -> String {
        format!("eta={}", self.eta)
    }
}

/// Both agents face the same trial stream, so their environments evolve
/// identically and the difference is paired.
fn paired_trial(eta: f64, p: &BanditParams, rng: &RngStream, every_step: bool) -> contilab_core::Result<Metrics> {
    let ts = run_agent(false, eta, p, rng)?;
    let ps = run_agent(true, eta, p, rng)?;
    let stride = if every_step { thinning_stride(p.horizon) } else { p.horizon };
    let a = running_means(&ts, stride);
    let b = running_means(&ps, stride);
    let mut m = Metrics::with_capacity(a.len() * 6);
    for (&(t, tr, tg), &(_, pr, pg)) in a.iter().zip(&b) {
        m.push((format!("ts.avg_reward@{t}"), tr));
        m.push((format!("ps.avg_reward@{t}"), pr));
        m.push((format!("ps_minus_ts.avg_reward@{t}"), pr - tr));
        m.push((format!("ts.greedy_freq@{t}"), tg));
        m.push((format!("ps.greedy_freq@{t}"), pg));
        m.push((format!("ps_minus_ts.greedy_freq@{t}"), pg - tg));
    }
    Ok(m)
}

/// Splits `agent.metric@t`.
fn split_name(name: &str) -> Option<(&str, &str, u64)> {
    let (head, t) = name.rsplit_once('@')?;
    let (agent, metric) = head.split_once('.')?;
    Some((agent, metric, t.parse().ok()?))
}

fn base_defaults(trials: &str) -> Vec<(&'static str, String)> {
    vec![
        ("seed", DEFAULT_SEED.to_string()),
        ("trials", trials.to_string()),
        ("horizon", "200".to_string()),
        ("env.arms", "2".to_string()),
        ("env.sigma", "1".to_string()),
    ]
}

fn config_of(pairs: Vec<(&'static str, String)>) -> Config {
    let borrowed: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (*k, v.as_str())).collect();
    Config::from_pairs(&borrowed)
}

pub struct PsVsTsTime;

impl Experiment for PsVsTsTime {
    fn name(&self) -> &'static str {
        "fig13_ps_vs_ts_time"
    }

    fn about(&self) -> &'static str {
        "Predictive versus Thompson sampling on an AR(1) bandit over time"
    }

    fn defaults(&self) -> Config {
        let mut d = base_defaults("2000");
        d.push(("env.eta", "0.9".into()));
        config_of(d)
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        BanditParams::read(cfg)?;
        cfg.f64_in("env.eta", 0.0, 1.0)?;
        Ok(())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = BanditParams::read(cfg)?;
        let eta = cfg.f64_in("env.eta", 0.0, 1.0)?;
        let cells = [EtaCell { eta }];
        let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, _, rng| paired_trial(c.eta, &p, &rng, true));
        let mut r = Report::new(&["agent", "t"]);
        let names: Vec<String> = table.cells[0].metrics.iter().map(|m| m.name.clone()).collect();
        let mut rows: Vec<(u64, usize, usize, &str, &str)> = Vec::new();
        let agent_rank = |a: &str| ["ts", "ps", "ps_minus_ts"].iter().position(|x| *x == a).unwrap_or(3);
        let metric_rank = |m: &str| ["avg_reward", "greedy_freq"].iter().position(|x| *x == m).unwrap_or(2);
        for n in &names {
            if let Some((agent, metric, t)) = split_name(n) {
                rows.push((t, metric_rank(metric), agent_rank(agent), agent, metric));
            }
        }
        rows.sort_by_key(|x| (x.2, x.1, x.0));
        for (t, _, _, agent, metric) in rows {
            r.push_metric(&table, 0, vec![Coord::text(agent), t.into()], &format!("{agent}.{metric}@{t}"), metric);
        }
        if names.is_empty() {
            r.push_cell(&table, 0, vec!["ps".into(), p.horizon.into()], &["avg_reward"]);
        }
        r.note_failures(&table);
        r.plot = Some(PlotSpec {
            title: format!("PS vs TS, eta = {eta}"),
            x: "t".into(),
            series: vec!["agent".into()],
            metrics: vec!["avg_reward".into()],
            log_x: false,
        });
        Ok(r)
    }
}

pub struct PsVsTsEta;

impl Experiment for PsVsTsEta {
    fn name(&self) -> &'static str {
        "fig14_ps_vs_ts_eta"
    }

    fn about(&self) -> &'static str {
        "Predictive versus Thompson sampling at the final step across AR(1) coefficients"
    }

    fn defaults(&self) -> Config {
        let mut d = base_defaults("2000");
        d.push(("sweep.eta", "0.1,0.3,0.5,0.7,0.9".into()));
        config_of(d)
    }

    fn validate(&self, cfg: &Config) -> Result<()> {
        BanditParams::read(cfg)?;
        cfg.f64_list_in("sweep.eta", 0.0, 1.0)?;
        Ok(())
    }

    fn run(&self, cfg: &Config) -> Result<Report> {
        let p = BanditParams::read(cfg)?;
        let etas = cfg.f64_list_in("sweep.eta", 0.0, 1.0)?;
        let cells: Vec<EtaCell> = etas.iter().map(|&eta| EtaCell { eta }).collect();
        let table = monte_carlo_sweep(&cells, p.trials, p.seed, |c, _, rng| paired_trial(c.eta, &p, &rng, false));
        let t = p.horizon;
        let mut r = Report::new(&["eta", "agent"]);
        for (i, c) in cells.iter().enumerate() {
            for agent in ["ts", "ps", "ps_minus_ts"] {
                for metric in ["avg_reward", "greedy_freq"] {
                    let source = format!("{agent}.{metric}@{t}");
                    r.push_metric(&table, i, vec![c.eta.into(), agent.into()], &source, metric);
                }
            }
        }
        r.note_failures(&table);
        r.plot = Some(PlotSpec {
            title: format!("PS vs TS at t = {t}"),
            x: "eta".into(),
            series: vec!["agent".into()],
            metrics: vec!["avg_reward".into()],
            log_x: false,
        });
        Ok(r)
    }
}
