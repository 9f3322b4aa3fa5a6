use crate::error::Result;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

/// Logistic sigmoid.
pub fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Binary observations with a fixed log-odds `θ ~ N(0, 1)`.
///
/// The action is a predicted probability of the symbol 1 and the reward is
/// its log-likelihood on the realized symbol.
#[derive(Clone, Debug)]
pub struct LogitEnv<F> {
    theta: F,
    fixed: Option<F>,
}

impl<F: Scalar> LogitEnv<F> {
    pub fn new() -> Self {
        Self { theta: F::zero(), fixed: None }
    }

    pub fn with_theta(theta: F) -> Self {
        Self { theta, fixed: Some(theta) }
    }

    pub fn theta(&self) -> F {
        self.theta
    }

    pub fn prob_one(&self) -> F {
        sigmoid(self.theta)
    }

    pub fn emit(&mut self, rng: &mut RngStream) -> bool {
        F::bernoulli(self.prob_one(), rng)
    }
}

impl<F: Scalar> Default for LogitEnv<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> Environment<F> for LogitEnv<F> {
    type Action = F;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::BinaryDistribution
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<bool> {
        self.theta = self.fixed.unwrap_or_else(|| F::standard_normal(rng));
        None
    }

    fn step(&mut self, p_one: &F, rng: &mut RngStream) -> Result<(bool, F)> {
        let o = self.emit(rng);
        let p = if o { *p_one } else { F::one() - *p_one };
        Ok((o, p.ln()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_and_symmetric() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!((sigmoid(2.0f64) - 0.880_797_077_977_882_3).abs() < 1e-15);
        assert!((sigmoid(-800.0f64)).abs() < 1e-300);
        assert_eq!(sigmoid(800.0f64), 1.0);
        assert!((sigmoid(1.3f64) + sigmoid(-1.3) - 1.0).abs() < 1e-15);
    }
}
