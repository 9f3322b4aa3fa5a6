use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

use super::uniform_argmax;

/// Tabular Q-learning with a constant optimism boost `ζ` added to every
/// entry after each step, so untried or stale actions eventually look
/// attractive again.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimisticQAgent<F> {
    states: usize,
    actions: usize,
    /// Row-major `Q[s * actions + a]`.
    pub q: Vec<F>,
    pub alpha: F,
    pub gamma: F,
    pub zeta: F,
    state: usize,
}

impl<F: Scalar> OptimisticQAgent<F> {
    pub fn new(states: usize, actions: usize, alpha: F, gamma: F, zeta: F) -> Result<Self> {
        if states == 0 || actions == 0 {
            return arg("Q table needs at least one state and one action");
        }
        if !(alpha >= F::zero() && alpha <= F::one()) {
            return arg(format!("stepsize must lie in [0, 1], got {alpha}"));
        }
        if !(gamma >= F::zero() && gamma < F::one()) {
            return arg(format!("discount must lie in [0, 1), got {gamma}"));
        }
        if !(zeta >= F::zero() && zeta.is_finite()) {
            return arg(format!("boost must be finite and nonnegative, got {zeta}"));
        }
        Ok(Self { states, actions, q: vec![F::zero(); states * actions], alpha, gamma, zeta, state: 0 })
    }

    pub fn row(&self, s: usize) -> &[F] {
        &self.q[s * self.actions..(s + 1) * self.actions]
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn optq_act(&self, s: usize, rng: &mut RngStream) -> usize {
        uniform_argmax(self.row(s), rng)
    }

    pub fn optq_update(&mut self, s: usize, a: usize, r: F, s_next: usize) -> Result<()> {
        if s >= self.states || s_next >= self.states || a >= self.actions {
            return arg(format!("index out of range: ({s}, {a}) -> {s_next}"));
        }
        let best_next = self.row(s_next).iter().copied().fold(F::neg_infinity(), F::max);
        let i = s * self.actions + a;
        self.q[i] = self.q[i] + self.alpha * (r + self.gamma * best_next - self.q[i]);
        let z = self.zeta;
        self.q.iter_mut().for_each(|x| *x = *x + z);
        Ok(())
    }
}

impl<F: Scalar> Agent<F> for OptimisticQAgent<F> {
    type Action = usize;
    type Observation = usize;

    fn action_space(&self) -> Space {
        Space::Discrete(self.actions)
    }

    fn observation_space(&self) -> Space {
        Space::Discrete(self.states)
    }

    fn reset(&mut self, initial: Option<&usize>, _rng: &mut RngStream) {
        self.q.iter_mut().for_each(|x| *x = F::zero());
        self.state = initial.copied().unwrap_or(0);
    }

    fn act(&mut self, rng: &mut RngStream) -> usize {
        self.optq_act(self.state, rng)
    }

    fn update(&mut self, a: &usize, s_next: &usize, reward: F, _rng: &mut RngStream) -> Result<()> {
        self.optq_update(self.state, *a, reward, *s_next)?;
        self.state = *s_next;
        Ok(())
    }

    fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
        let max = self.q.iter().copied().fold(F::neg_infinity(), F::max);
        out.push(("q_max", max));
    }
}
