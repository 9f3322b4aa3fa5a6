//! Registered experiments. Each one declares its parameters with defaults,
//! validates them without running, and produces a [`Report`].

mod bandit;
mod coins;
mod lms;
mod mdp;

use contilab_core::{Agent, Real, RngStream, Space};

use crate::config::Config;
use crate::error::Result;
use crate::report::Report;

pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Every accepted key with its default value.
    fn defaults(&self) -> Config;
    /// Checks all parameters without doing the work.
    fn validate(&self, cfg: &Config) -> Result<()>;
    fn run(&self, cfg: &Config) -> Result<Report>;
}

pub fn registry() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(lms::LmsSweep),
        Box::new(lms::ErrorsVsAlpha),
        Box::new(lms::OptimalAlpha),
        Box::new(lms::Idbd),
        Box::new(bandit::PsVsTsTime),
        Box::new(bandit::PsVsTsEta),
        Box::new(mdp::MdpAlpha),
        Box::new(mdp::MdpBoost),
        Box::new(coins::LogitRegret),
        Box::new(coins::BitFlipDemo),
        Box::new(coins::CoinSwapBelief),
    ]
}

pub fn list_experiments() -> Vec<&'static str> {
    registry().iter().map(|e| e.name()).collect()
}

pub fn find(name: &str) -> Option<Box<dyn Experiment>> {
    registry().into_iter().find(|e| e.name() == name)
}

pub(crate) const DEFAULT_SEED: &str = "1";

/// `i·step` for `i = 1, 2, …` strictly inside `(0, 1)`.
pub(crate) fn unit_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (1..n).map(|i| i as f64 / n as f64).collect()
}

/// Index of the smallest value; ties keep the first. NaNs never win.
pub(crate) fn argmin(xs: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if x.is_nan() {
            continue;
        }
        if best.is_none_or(|b| x < xs[b]) {
            best = Some(i);
        }
    }
    best
}

pub(crate) fn argmax(xs: &[f64]) -> Option<usize> {
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    argmin(&neg)
}

/// Forwards to an inner agent and records a per-step flag read right after
/// each action is chosen.
pub(crate) struct Flagged<A> {
    pub inner: A,
    pub flags: Vec<bool>,
    probe: fn(&A) -> bool,
}

impl<A> Flagged<A> {
    pub fn new(inner: A, probe: fn(&A) -> bool) -> Self {
        Self { inner, flags: Vec::new(), probe }
    }
}

impl<A: Agent<Real>> Agent<Real> for Flagged<A> {
    type Action = A::Action;
    type Observation = A::Observation;

    fn action_space(&self) -> Space {
        self.inner.action_space()
    }

    fn observation_space(&self) -> Space {
        self.inner.observation_space()
    }

    fn reset(&mut self, initial: Option<&Self::Observation>, rng: &mut RngStream) {
        self.flags.clear();
        self.inner.reset(initial, rng);
    }

    fn act(&mut self, rng: &mut RngStream) -> Self::Action {
        let a = self.inner.act(rng);
        self.flags.push((self.probe)(&self.inner));
        a
    }

    fn update(
        &mut self,
        action: &Self::Action,
        observation: &Self::Observation,
        reward: Real,
        rng: &mut RngStream,
    ) -> contilab_core::Result<()> {
        self.inner.update(action, observation, reward, rng)
    }
}

/// Always pulls the same coin.
pub(crate) struct FixedArm {
    pub arm: usize,
    pub arms: usize,
}

impl Agent<Real> for FixedArm {
    type Action = usize;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::Discrete(self.arms)
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn act(&mut self, _rng: &mut RngStream) -> usize {
        self.arm
    }

    fn update(&mut self, _: &usize, _: &bool, _: Real, _: &mut RngStream) -> contilab_core::Result<()> {
        Ok(())
    }
}
