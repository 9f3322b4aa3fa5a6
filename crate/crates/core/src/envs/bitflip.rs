use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

use super::coin::CoinPrior;

/// Bit stream that flips with an unknown probability `p` drawn once per episode.
///
/// The first bit is uniform. The action is a predicted bit; reward 1 when it
/// matches the emitted bit.
#[derive(Clone, Debug)]
pub struct BitFlipEnv<F> {
    pub prior: CoinPrior<F>,
    p: F,
    last: Option<bool>,
}

impl<F: Scalar> BitFlipEnv<F> {
    pub fn new(prior: CoinPrior<F>) -> Result<Self> {
        if let CoinPrior::Beta { a, b } = prior {
            if !(a > F::zero() && b > F::zero()) {
                return arg("beta prior parameters must be positive");
            }
        }
        Ok(Self { prior, p: F::zero(), last: None })
    }

    pub fn flip_prob(&self) -> F {
        self.p
    }

    pub fn emit(&mut self, rng: &mut RngStream) -> bool {
        let bit = match self.last {
            None => F::bernoulli(F::lit(0.5), rng),
            Some(b) => b ^ F::bernoulli(self.p, rng),
        };
        self.last = Some(bit);
        bit
    }
}

impl<F: Scalar> Environment<F> for BitFlipEnv<F> {
    type Action = bool;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::Binary
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<bool> {
        self.p = self.prior.sample(rng);
        self.last = None;
        None
    }

    fn step(&mut self, guess: &bool, rng: &mut RngStream) -> Result<(bool, F)> {
        let bit = self.emit(rng);
        Ok((bit, if bit == *guess { F::one() } else { F::zero() }))
    }
}
