use std::sync::Arc;

use crate::error::{arg, Result};
use crate::mdp::belief::drift;
use crate::mdp::{BeliefPolicy, CoinChoice};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

/// Exact Bayesian filter for the two-coin game with a known coin (arm 0)
/// and a dyadic swapping coin (arm 1).
///
/// `b` is the probability, at decision time, that the swapping coin has bias 1.
/// Without a planned policy the agent pulls whichever coin has the higher
/// immediate expected payoff, preferring the known coin on ties.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicCoinBeliefAgent<F> {
    pub b: F,
    pub p1: F,
    pub q2: F,
    policy: Option<Arc<BeliefPolicy<F>>>,
}

impl<F: Scalar> DyadicCoinBeliefAgent<F> {
    pub fn new(p1: F, q2: F) -> Result<Self> {
        let unit = |x: F| x >= F::zero() && x <= F::one();
        if !unit(p1) || !unit(q2) {
            return arg("p1 and q2 must lie in [0, 1]");
        }
        Ok(Self { b: F::lit(0.5), p1, q2, policy: None })
    }

    pub fn with_policy(mut self, policy: Arc<BeliefPolicy<F>>) -> Self {
        self.policy = Some(policy);
        self
    }

    pub fn choice(&self) -> CoinChoice {
        match &self.policy {
            Some(p) => p.choose(self.b),
            None if self.b > self.p1 => CoinChoice::Swapping,
            None => CoinChoice::Known,
        }
    }

    /// Conditions on the toss (if the swapping coin was pulled), then applies
    /// the replacement step.
    pub fn coin_belief_update(&mut self, pulled_coin2: bool, outcome: Option<bool>) -> Result<F> {
        match (pulled_coin2, outcome) {
            (true, Some(heads)) => self.b = if heads { F::one() } else { F::zero() },
            (false, _) => {}
            (true, None) => return arg("pulling the swapping coin must report its outcome"),
        }
        self.b = drift(self.b, self.q2);
        Ok(self.b)
    }
}

impl<F: Scalar> Agent<F> for DyadicCoinBeliefAgent<F> {
    type Action = usize;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::Discrete(2)
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, _initial: Option<&bool>, _rng: &mut RngStream) {
        self.b = F::lit(0.5);
    }

    fn act(&mut self, _rng: &mut RngStream) -> usize {
        match self.choice() {
            CoinChoice::Known => 0,
            CoinChoice::Swapping => 1,
        }
    }

    fn update(&mut self, arm: &usize, heads: &bool, _reward: F, _rng: &mut RngStream) -> Result<()> {
        let pulled = *arm == 1;
        self.coin_belief_update(pulled, pulled.then_some(*heads)).map(|_| ())
    }

    fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
        out.push(("belief", self.b));
    }
}
