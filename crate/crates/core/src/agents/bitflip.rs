use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

/// One-bit agent for the bit-flip source: remembers only the last bit and
/// predicts a flip when the prior mean flip probability exceeds one half.
#[derive(Clone, Debug, PartialEq)]
pub struct BitFlipAgent<F> {
    pub mean_p: F,
    pub last_bit: Option<bool>,
}

impl<F: Scalar> BitFlipAgent<F> {
    pub fn new(mean_p: F) -> Result<Self> {
        if !(mean_p >= F::zero() && mean_p <= F::one()) {
            return arg(format!("mean flip probability must lie in [0, 1], got {mean_p}"));
        }
        Ok(Self { mean_p, last_bit: None })
    }

    /// `P(next bit = 1)` under the agent's state.
    pub fn prob_one(&self) -> F {
        match self.last_bit {
            None => F::lit(0.5),
            Some(true) => F::one() - self.mean_p,
            Some(false) => self.mean_p,
        }
    }

    pub fn bitflip_act(&self, rng: &mut RngStream) -> bool {
        let half = F::lit(0.5);
        let p = self.prob_one();
        match self.last_bit {
            None => true,
            Some(_) if p > half => true,
            Some(_) if p < half => false,
            Some(_) => F::bernoulli(half, rng),
        }
    }
}

impl<F: Scalar> Agent<F> for BitFlipAgent<F> {
    type Action = bool;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::Binary
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, _initial: Option<&bool>, _rng: &mut RngStream) {
        self.last_bit = None;
    }

    fn act(&mut self, rng: &mut RngStream) -> bool {
        self.bitflip_act(rng)
    }

    fn update(&mut self, _action: &bool, bit: &bool, _reward: F, _rng: &mut RngStream) -> Result<()> {
        self.last_bit = Some(*bit);
        Ok(())
    }
}
