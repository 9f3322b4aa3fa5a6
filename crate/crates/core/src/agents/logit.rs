use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

pub const DEFAULT_GRID_POINTS: usize = 513;
/// The grid covers `[−6, 6]`.
pub const GRID_HALF_WIDTH: f64 = 6.0;

/// `ln(1 + e^x)` without overflow.
fn softplus<F: Scalar>(x: F) -> F {
    if x > F::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Bayesian predictor for a binary source with `P(1) = sigmoid(θ)`,
/// `θ ~ N(0, 1)`, using trapezoidal quadrature over `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitPredictorAgent<F> {
    theta: Vec<F>,
    /// Log prior mass per node, including the quadrature weight.
    log_prior: Vec<F>,
    log_post: Vec<F>,
}

impl<F: Scalar> LogitPredictorAgent<F> {
    pub fn new(points: usize) -> Result<Self> {
        if points < 3 {
            return arg("quadrature needs at least three nodes");
        }
        let w = F::lit(GRID_HALF_WIDTH);
        let step = F::lit(2.0) * w / F::count(points - 1);
        let theta: Vec<F> = (0..points).map(|i| -w + step * F::count(i)).collect();
        let log_prior: Vec<F> = theta
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let edge = if i == 0 || i + 1 == points { F::lit(0.5) } else { F::one() };
                edge.ln() - F::lit(0.5) * t * t
            })
            .collect();
        Ok(Self { log_post: log_prior.clone(), theta, log_prior })
    }

    pub fn observe(&mut self, bit: bool) {
        for (lp, &t) in self.log_post.iter_mut().zip(&self.theta) {
            // ln σ(θ) = −softplus(−θ), ln(1 − σ(θ)) = −softplus(θ)
            *lp = *lp - if bit { softplus(-t) } else { softplus(t) };
        }
    }

    /// Normalized posterior weights over the grid.
    pub fn weights(&self) -> Vec<F> {
        let m = self.log_post.iter().copied().fold(F::neg_infinity(), F::max);
        let raw: Vec<F> = self.log_post.iter().map(|&l| (l - m).exp()).collect();
        let z: F = raw.iter().copied().sum();
        raw.into_iter().map(|x| x / z).collect()
    }

    /// Posterior-predictive probability of a 1.
    pub fn logit_predict(&self) -> F {
        let w = self.weights();
        w.iter().zip(&self.theta).map(|(&wi, &t)| wi * (-softplus(-t)).exp()).sum()
    }
}

impl<F: Scalar> Agent<F> for LogitPredictorAgent<F> {
    type Action = F;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::BinaryDistribution
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, _initial: Option<&bool>, _rng: &mut RngStream) {
        self.log_post.clone_from(&self.log_prior);
    }

    fn act(&mut self, _rng: &mut RngStream) -> F {
        self.logit_predict()
    }

    fn update(&mut self, _action: &F, bit: &bool, _reward: F, _rng: &mut RngStream) -> Result<()> {
        self.observe(*bit);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_prediction_is_one_half() {
        let a = LogitPredictorAgent::<f64>::new(DEFAULT_GRID_POINTS).unwrap();
        assert!((a.logit_predict() - 0.5).abs() < 1e-14);
        let s: f64 = a.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0f64), 1000.0);
        assert!(softplus(-1000.0f64) >= 0.0);
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
    }
}
