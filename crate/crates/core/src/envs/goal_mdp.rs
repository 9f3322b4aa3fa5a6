use std::sync::Arc;

use rand_distr::{Distribution, Geometric};

use crate::error::{arg, Error, Result};
use crate::mdp::{scale_goal_reward, TabularMdp};
use crate::rng::{RngStream, StreamRole};
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

/// Shape and drift rate of a goal-reaching MDP whose transition rows are
/// replaced over time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalMdpParams<F> {
    pub states: usize,
    pub actions: usize,
    /// Per-step probability that a given `(s, a)` row is redrawn.
    pub resample_prob: F,
    pub goal: usize,
    /// Discount used when rescaling the goal reward.
    pub gamma: F,
}

impl<F: Scalar> GoalMdpParams<F> {
    /// Ten states, three actions, goal state 0, scaling discount 0.9.
    pub fn standard(resample_prob: F) -> Self {
        Self { states: 10, actions: 3, resample_prob, goal: 0, gamma: F::lit(0.9) }
    }

    fn validate(&self) -> Result<()> {
        if self.states < 2 || self.actions < 1 {
            return arg("goal MDP needs at least two states and one action");
        }
        if self.goal >= self.states {
            return arg(format!("goal state {} out of range", self.goal));
        }
        if !(self.resample_prob >= F::zero() && self.resample_prob <= F::one()) {
            return arg(format!("resample probability must lie in [0, 1], got {}", self.resample_prob));
        }
        if !(self.gamma > F::zero() && self.gamma < F::one()) {
            return arg("scaling discount must lie in (0, 1)");
        }
        Ok(())
    }

    fn rows(&self) -> usize {
        self.states * self.actions
    }
}

/// Draws a Dirichlet(1/S, …, 1/S) row via normalized Gamma variates.
pub fn sample_dirichlet_row<F: Scalar>(out: &mut [F], rng: &mut RngStream) {
    let shape = F::one() / F::count(out.len());
    loop {
        let mut total = F::zero();
        for x in out.iter_mut() {
            *x = F::gamma(shape, rng);
            total = total + *x;
        }
        if total > F::zero() && total.is_finite() {
            for x in out.iter_mut() {
                *x = *x / total;
            }
            return;
        }
    }
}

const MAX_REDRAWS: usize = 10_000;

/// The row-replacement process, independent of the agent's behaviour.
#[derive(Clone, Debug)]
struct Drift<F> {
    params: GoalMdpParams<F>,
    rng: RngStream,
    geometric: Option<Geometric>,
    next_change: Vec<u64>,
}

impl<F: Scalar> Drift<F> {
    fn start(params: GoalMdpParams<F>, stream: &RngStream, p: &mut [F]) -> Result<(Self, F)> {
        let mut rng = stream.child(StreamRole::Dynamics);
        let s = params.states;
        let all: Vec<usize> = (0..params.rows()).collect();
        let reward = redraw_until_valid(&params, p, &all, &mut rng)?;
        let eta = params.resample_prob.to_f64_lossy();
        let geometric =
            if eta > 0.0 { Some(Geometric::new(eta).map_err(|e| Error::Argument(e.to_string()))?) } else { None };
        let mut d = Self { params, rng, geometric, next_change: Vec::new() };
        d.next_change = (0..params.rows()).map(|_| d.gap(0)).collect();
        debug_assert_eq!(p.len(), params.rows() * s);
        Ok((d, reward))
    }

    /// Step at which a row resampled at `from − 1` (or never) changes next.
    fn gap(&mut self, from: u64) -> u64 {
        match &self.geometric {
            Some(g) => from.saturating_add(g.sample(&mut self.rng)),
            None => u64::MAX,
        }
    }

    /// Applies the replacements scheduled for step `t`; returns the changed
    /// rows and the new goal reward if anything changed.
    fn advance(&mut self, t: u64, p: &mut [F]) -> Result<Option<(Vec<usize>, F)>> {
        let changed: Vec<usize> = (0..self.next_change.len()).filter(|&r| self.next_change[r] == t).collect();
        if changed.is_empty() {
            return Ok(None);
        }
        for &r in &changed {
            self.next_change[r] = self.gap(t + 1);
        }
        let reward = redraw_until_valid(&self.params, p, &changed, &mut self.rng)?;
        Ok(Some((changed, reward)))
    }
}

/// Redraws `rows` until the greedy policy reaches the goal, returning the scaled goal reward.
fn redraw_until_valid<F: Scalar>(
    params: &GoalMdpParams<F>,
    p: &mut [F],
    rows: &[usize],
    rng: &mut RngStream,
) -> Result<F> {
    let s = params.states;
    for _ in 0..MAX_REDRAWS {
        for &r in rows {
            sample_dirichlet_row(&mut p[r * s..(r + 1) * s], rng);
        }
        let mdp = TabularMdp::with_goal(s, params.actions, p.to_vec(), params.goal, F::one(), params.gamma)?;
        match scale_goal_reward(&mdp, params.goal) {
            Ok(r) => return Ok(r),
            Err(Error::DegenerateMdp { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Numeric("could not draw a goal-reachable MDP".into()))
}

/// One batch of row replacements.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftEvent<F> {
    pub step: u64,
    pub rows: Vec<(usize, Vec<F>)>,
    pub goal_reward: F,
}

/// Recorded row-replacement history for a fixed horizon.
///
/// The replacement process does not depend on actions, so one recording can
/// drive any number of agents and reproduce a live run exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftSchedule<F> {
    pub params: GoalMdpParams<F>,
    pub horizon: u64,
    pub initial: Vec<F>,
    pub initial_reward: F,
    pub events: Vec<DriftEvent<F>>,
}

impl<F: Scalar> DriftSchedule<F> {
    /// Records the drift a live environment would see when reset with the
    /// environment stream `env_stream`.
    pub fn generate(params: GoalMdpParams<F>, horizon: u64, env_stream: &RngStream) -> Result<Self> {
        params.validate()?;
        let mut p = vec![F::zero(); params.rows() * params.states];
        let (mut drift, initial_reward) = Drift::start(params, env_stream, &mut p)?;
        let initial = p.clone();
        let s = params.states;
        let mut events = Vec::new();
        for t in 0..horizon {
            if let Some((rows, goal_reward)) = drift.advance(t, &mut p)? {
                let rows = rows.into_iter().map(|r| (r, p[r * s..(r + 1) * s].to_vec())).collect();
                events.push(DriftEvent { step: t, rows, goal_reward });
            }
        }
        Ok(Self { params, horizon, initial, initial_reward, events })
    }
}

#[derive(Clone, Debug)]
enum Source<F> {
    Live(Option<Box<Drift<F>>>),
    Replay { schedule: Arc<DriftSchedule<F>>, cursor: usize },
}

/// Goal-reaching MDP with Dirichlet transition rows that are independently
/// redrawn with probability `η` per step.
///
/// Entering the goal pays `0.5 / d_g`, recomputed whenever any row changes,
/// where `d_g` is the goal's long-run mass under the discounted-optimal
/// greedy policy. Observations are the next state.
#[derive(Clone, Debug)]
pub struct GoalMdpEnv<F> {
    params: GoalMdpParams<F>,
    p: Vec<F>,
    goal_reward: F,
    state: usize,
    t: u64,
    last_changed: usize,
    source: Source<F>,
}

impl<F: Scalar> GoalMdpEnv<F> {
    pub fn new(params: GoalMdpParams<F>) -> Result<Self> {
        params.validate()?;
        Ok(Self::blank(params, Source::Live(None)))
    }

    /// Environment whose drift is read from a recording instead of sampled.
    pub fn replay(schedule: Arc<DriftSchedule<F>>) -> Self {
        Self::blank(schedule.params, Source::Replay { schedule, cursor: 0 })
    }

    fn blank(params: GoalMdpParams<F>, source: Source<F>) -> Self {
        Self {
            params,
            p: vec![F::zero(); params.rows() * params.states],
            goal_reward: F::zero(),
            state: 0,
            t: 0,
            last_changed: 0,
            source,
        }
    }

    pub fn params(&self) -> &GoalMdpParams<F> {
        &self.params
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn goal_reward(&self) -> F {
        self.goal_reward
    }

    pub fn transitions(&self) -> &[F] {
        &self.p
    }

    pub fn row(&self, s: usize, a: usize) -> &[F] {
        let i = (s * self.params.actions + a) * self.params.states;
        &self.p[i..i + self.params.states]
    }

    /// Number of rows replaced at the start of the last step.
    pub fn rows_changed_last_step(&self) -> usize {
        self.last_changed
    }

    fn apply_drift(&mut self) -> Result<()> {
        let t = self.t;
        let s = self.params.states;
        self.last_changed = 0;
        match &mut self.source {
            Source::Live(drift) => {
                let drift = drift.as_mut().ok_or_else(|| Error::Config("environment used before reset".into()))?;
                if let Some((rows, reward)) = drift.advance(t, &mut self.p)? {
                    self.last_changed = rows.len();
                    self.goal_reward = reward;
                }
            }
            Source::Replay { schedule, cursor } => {
                if t >= schedule.horizon {
                    return Err(Error::Config(format!("drift recording ends at step {}", schedule.horizon)));
                }
                if let Some(ev) = schedule.events.get(*cursor).filter(|ev| ev.step == t) {
                    for (r, row) in &ev.rows {
                        self.p[r * s..(r + 1) * s].copy_from_slice(row);
                    }
                    self.last_changed = ev.rows.len();
                    self.goal_reward = ev.goal_reward;
                    *cursor += 1;
                }
            }
        }
        Ok(())
    }

    /// Advances the drift, then moves from the current state under `action`.
    pub fn mdp_step(&mut self, action: usize, rng: &mut RngStream) -> Result<(usize, F)> {
        if action >= self.params.actions {
            return arg(format!("action {action} out of range"));
        }
        self.apply_drift()?;
        let row = self.row(self.state, action);
        let u = F::unit_uniform(rng);
        let mut acc = F::zero();
        let mut next = row.len() - 1;
        for (i, &p) in row.iter().enumerate() {
            acc = acc + p;
            if u < acc {
                next = i;
                break;
            }
        }
        self.state = next;
        self.t += 1;
        let reward = if next == self.params.goal { self.goal_reward } else { F::zero() };
        Ok((next, reward))
    }
}

impl<F: Scalar> Environment<F> for GoalMdpEnv<F> {
    type Action = usize;
    type Observation = usize;

    fn action_space(&self) -> Space {
        Space::Discrete(self.params.actions)
    }

    fn observation_space(&self) -> Space {
        Space::Discrete(self.params.states)
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<usize> {
        self.t = 0;
        self.last_changed = 0;
        match &mut self.source {
            Source::Live(drift) => {
                // construction already validated the parameters
                let (d, reward) = Drift::start(self.params, rng, &mut self.p).expect("valid goal MDP parameters");
                *drift = Some(Box::new(d));
                self.goal_reward = reward;
            }
            Source::Replay { schedule, cursor } => {
                self.p.copy_from_slice(&schedule.initial);
                self.goal_reward = schedule.initial_reward;
                *cursor = 0;
            }
        }
        self.state =
            (F::unit_uniform(rng) * F::count(self.params.states)).to_usize().unwrap_or(0).min(self.params.states - 1);
        Some(self.state)
    }

    fn step(&mut self, action: &usize, rng: &mut RngStream) -> Result<(usize, F)> {
        self.mdp_step(*action, rng)
    }
}
