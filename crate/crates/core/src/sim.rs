//! The agent-environment loop and finite-horizon average-reward evaluation.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamRole};
use crate::scalar::Scalar;
use crate::stats::CompensatedSum;

/// Shape of an action or observation set, used to reject mismatched pairings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Real,
    Binary,
    /// `{0, …, n−1}`.
    Discrete(usize),
    /// A probability of the symbol 1 over a binary alphabet.
    BinaryDistribution,
}

pub trait Environment<F: Scalar> {
    type Action: Clone + Debug;
    type Observation: Clone + Debug;

    fn action_space(&self) -> Space;
    fn observation_space(&self) -> Space;

    /// Starts a fresh episode and returns the initial observation, if any.
    fn reset(&mut self, rng: &mut RngStream) -> Option<Self::Observation>;

    /// Executes `action`, returning the next observation and its reward.
    fn step(&mut self, action: &Self::Action, rng: &mut RngStream) -> Result<(Self::Observation, F)>;
}

pub trait Agent<F: Scalar> {
    type Action: Clone + Debug;
    type Observation: Clone + Debug;

    fn action_space(&self) -> Space;
    fn observation_space(&self) -> Space;

    /// Called once per episode with the environment's initial observation.
    fn reset(&mut self, _initial: Option<&Self::Observation>, _rng: &mut RngStream) {}

    fn act(&mut self, rng: &mut RngStream) -> Self::Action;

    fn update(
        &mut self,
        action: &Self::Action,
        observation: &Self::Observation,
        reward: F,
        rng: &mut RngStream,
    ) -> Result<()>;

    /// Named scalar diagnostics of the current internal state (stepsize,
    /// belief, …). Recorded after every update when requested.
    fn diagnostics(&self, _out: &mut Vec<(&'static str, F)>) {}
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<A, O, F> {
    pub t: u64,
    pub action: A,
    pub observation: O,
    pub reward: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySummary<F> {
    pub horizon: u64,
    pub average_reward: F,
    /// `(t, mean of the first t rewards)` at every thinning stride.
    pub reward_series: Option<Vec<(u64, F)>>,
    pub diagnostics: BTreeMap<String, Vec<(u64, F)>>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub record_series: bool,
    pub record_diagnostics: bool,
}

/// Maximum number of retained points in thinned series.
pub const SERIES_POINTS: u64 = 2000;

pub fn thinning_stride(horizon: u64) -> u64 {
    horizon.div_ceil(SERIES_POINTS).max(1)
}

/// Runs `agent` against `env` for `horizon` steps with default options.
pub fn run_trajectory<F, E, G>(
    env: &mut E,
    agent: &mut G,
    horizon: u64,
    rng: &RngStream,
) -> Result<TrajectorySummary<F>>
where
    F: Scalar,
    E: Environment<F>,
    G: Agent<F, Action = E::Action, Observation = E::Observation>,
{
    run_trajectory_with(env, agent, horizon, rng, RunOptions::default(), |_| {})
}

/// Runs the loop and hands every [`StepRecord`] to `observer`.
///
/// The environment draws only from the `EnvNoise` child of `rng` and the
/// agent only from the `AgentNoise` child.
pub fn run_trajectory_with<F, E, G>(
    env: &mut E,
    agent: &mut G,
    horizon: u64,
    rng: &RngStream,
    options: RunOptions,
    mut observer: impl FnMut(&StepRecord<E::Action, E::Observation, F>),
) -> Result<TrajectorySummary<F>>
where
    F: Scalar,
    E: Environment<F>,
    G: Agent<F, Action = E::Action, Observation = E::Observation>,
{
    if horizon == 0 {
        return Err(Error::Argument("horizon must be at least 1".into()));
    }
    if env.action_space() != agent.action_space() || env.observation_space() != agent.observation_space() {
        return Err(Error::Config(format!(
            "agent interface ({:?}, {:?}) does not match environment ({:?}, {:?})",
            agent.action_space(),
            agent.observation_space(),
            env.action_space(),
            env.observation_space()
        )));
    }

    let mut env_rng = rng.child(StreamRole::EnvNoise);
    let mut agent_rng = rng.child(StreamRole::AgentNoise);
    let stride = thinning_stride(horizon);

    let initial = env.reset(&mut env_rng);
    agent.reset(initial.as_ref(), &mut agent_rng);

    let mut total = CompensatedSum::new();
    let mut series = options.record_series.then(Vec::new);
    let mut diagnostics: BTreeMap<String, Vec<(u64, F)>> = BTreeMap::new();
    let mut probe = Vec::new();

    for t in 0..horizon {
        let action = agent.act(&mut agent_rng);
        let (observation, reward) = env.step(&action, &mut env_rng)?;
        if !reward.is_finite() {
            return Err(Error::NumericAtStep { step: t, message: format!("non-finite reward {reward}") });
        }
        total.add(reward);
        agent.update(&action, &observation, reward, &mut agent_rng).map_err(|e| at_step(e, t))?;

        let done = t + 1;
        if done % stride == 0 || done == horizon {
            if let Some(s) = series.as_mut() {
                s.push((done, total.value() / F::lit(done as f64)));
            }
            if options.record_diagnostics {
                probe.clear();
                agent.diagnostics(&mut probe);
                for &(name, v) in &probe {
                    diagnostics.entry(name.to_string()).or_default().push((done, v));
                }
            }
        }
        observer(&StepRecord { t, action, observation, reward });
    }

    Ok(TrajectorySummary {
        horizon,
        average_reward: total.value() / F::lit(horizon as f64),
        reward_series: series,
        diagnostics,
    })
}

fn at_step(e: Error, step: u64) -> Error {
    match e {
        Error::Numeric(message) => Error::NumericAtStep { step, message },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    struct Constant;
    impl Environment<f64> for Constant {
        type Action = usize;
        type Observation = bool;
        fn action_space(&self) -> Space {
            Space::Discrete(2)
        }
        fn observation_space(&self) -> Space {
            Space::Binary
        }
        fn reset(&mut self, _: &mut RngStream) -> Option<bool> {
            None
        }
        fn step(&mut self, _: &usize, _: &mut RngStream) -> Result<(bool, f64)> {
            Ok((true, 1.0))
        }
    }

    struct Coin;
    impl Environment<f64> for Coin {
        type Action = usize;
        type Observation = bool;
        fn action_space(&self) -> Space {
            Space::Discrete(2)
        }
        fn observation_space(&self) -> Space {
            Space::Binary
        }
        fn reset(&mut self, _: &mut RngStream) -> Option<bool> {
            None
        }
        fn step(&mut self, a: &usize, rng: &mut RngStream) -> Result<(bool, f64)> {
            let heads = rng.random::<bool>();
            let r = if (*a == 1) == heads { 1.0 } else { 0.0 };
            Ok((heads, r))
        }
    }

    struct Guess(usize);
    impl Agent<f64> for Guess {
        type Action = usize;
        type Observation = bool;
        fn action_space(&self) -> Space {
            Space::Discrete(self.0)
        }
        fn observation_space(&self) -> Space {
            Space::Binary
        }
        fn act(&mut self, rng: &mut RngStream) -> usize {
            rng.random_range(0..2)
        }
        fn update(&mut self, _: &usize, _: &bool, _: f64, _: &mut RngStream) -> Result<()> {
            Ok(())
        }
        fn diagnostics(&self, out: &mut Vec<(&'static str, f64)>) {
            out.push(("arms", self.0 as f64));
        }
    }

    #[test]
    fn constant_reward_averages_to_one() {
        let s = run_trajectory(&mut Constant, &mut Guess(2), 100, &RngStream::new(0, 0)).unwrap();
        assert_eq!(s.average_reward, 1.0);
        assert_eq!(s.horizon, 100);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let e = run_trajectory(&mut Constant, &mut Guess(3), 10, &RngStream::new(0, 0)).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }

    #[test]
    fn fair_coin_prediction_is_half() {
        let n = 100_000u64;
        let s = run_trajectory(&mut Coin, &mut Guess(2), n, &RngStream::new(5, 1)).unwrap();
        let stderr = 0.5 / (n as f64).sqrt();
        assert!((s.average_reward - 0.5).abs() < 3.0 * stderr, "{}", s.average_reward);
    }

    #[test]
    fn replay_matches_summary_and_is_deterministic() {
        let opts = RunOptions { record_series: true, record_diagnostics: true };
        let rng = RngStream::new(11, 4);
        let mut rewards = Vec::new();
        let a = run_trajectory_with(&mut Coin, &mut Guess(2), 5001, &rng, opts, |r| rewards.push(r.reward)).unwrap();
        let b = run_trajectory_with(&mut Coin, &mut Guess(2), 5001, &rng, opts, |_| {}).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.average_reward, crate::stats::average_reward(&rewards).unwrap());
        let series = a.reward_series.unwrap();
        assert_eq!(series.first().unwrap().0, 3);
        assert_eq!(series.last().unwrap(), &(5001, a.average_reward));
        assert!(series.len() <= SERIES_POINTS as usize + 1);
        assert_eq!(a.diagnostics["arms"].len(), series.len());
    }

    #[test]
    fn non_finite_reward_reports_step() {
        struct Bad;
        impl Environment<f64> for Bad {
            type Action = usize;
            type Observation = bool;
            fn action_space(&self) -> Space {
                Space::Discrete(2)
            }
            fn observation_space(&self) -> Space {
                Space::Binary
            }
            fn reset(&mut self, _: &mut RngStream) -> Option<bool> {
                None
            }
            fn step(&mut self, _: &usize, _: &mut RngStream) -> Result<(bool, f64)> {
                Ok((false, f64::NAN))
            }
        }
        let e = run_trajectory(&mut Bad, &mut Guess(2), 3, &RngStream::new(0, 0)).unwrap_err();
        assert_eq!(e, Error::NumericAtStep { step: 0, message: "non-finite reward NaN".into() });
    }
}
