use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

use super::{is_argmax, uniform_argmax};

/// Kalman-style posterior over the drifting mean rewards of a bandit with
/// AR(1) arms.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmPosterior<F> {
    pub mu: Vec<F>,
    /// Posterior variances, strictly positive.
    pub var: Vec<F>,
    pub eta: F,
    pub zeta: F,
    pub sigma: F,
    mu0: F,
    var0: F,
}

impl<F: Scalar> ArmPosterior<F> {
    pub fn new(arms: usize, eta: F, zeta: F, sigma: F, mu0: F, var0: F) -> Result<Self> {
        if arms == 0 {
            return arg("need at least one arm");
        }
        if !(zeta >= F::zero() && sigma > F::zero() && var0 > F::zero()) || !eta.is_finite() {
            return arg("posterior needs ζ ≥ 0, σ > 0 and a positive prior variance");
        }
        Ok(Self { mu: vec![mu0; arms], var: vec![var0; arms], eta, zeta, sigma, mu0, var0 })
    }

    /// Unit-variance stationary arms: `ζ² = 1 − η²`, prior `N(0, 1)`.
    pub fn stationary(arms: usize, eta: F, sigma: F) -> Result<Self> {
        let zeta = (F::one() - eta * eta).max(F::zero()).sqrt();
        Self::new(arms, eta, zeta, sigma, F::zero(), F::one())
    }

    pub fn arms(&self) -> usize {
        self.mu.len()
    }

    fn clear(&mut self) {
        self.mu.iter_mut().for_each(|m| *m = self.mu0);
        self.var.iter_mut().for_each(|v| *v = self.var0);
    }

    /// Pulled arm: propagate one step and condition on the reward. Other
    /// arms: propagate only.
    pub fn ts_update(&mut self, arm: usize, reward: F) -> Result<()> {
        if arm >= self.arms() {
            return arg(format!("arm {arm} does not exist"));
        }
        let s2 = self.sigma * self.sigma;
        let z2 = self.zeta * self.zeta;
        let e2 = self.eta * self.eta;
        for a in 0..self.arms() {
            let prior_mean = self.eta * self.mu[a];
            let prior_var = e2 * self.var[a] + z2;
            if a == arm {
                let var = F::one() / (F::one() / prior_var + F::one() / s2);
                let gain = var / s2;
                self.mu[a] = prior_mean + gain * (reward - prior_mean);
                self.var[a] = var;
            } else {
                self.mu[a] = prior_mean;
                self.var[a] = prior_var;
            }
        }
        Ok(())
    }

    fn draw(&self, variances: impl Iterator<Item = F>, rng: &mut RngStream) -> usize {
        let samples: Vec<F> =
            self.mu.iter().zip(variances).map(|(&m, v)| m + v.sqrt() * F::standard_normal(rng)).collect();
        uniform_argmax(&samples, rng)
    }
}

/// Positive root `x*` of the stationary prediction-variance equation used by
/// predictive sampling.
pub fn ps_x_star<F: Scalar>(eta: F, zeta: F, sigma: F) -> F {
    let (e2, z2, s2) = (eta * eta, zeta * zeta, sigma * sigma);
    let b = z2 + s2 - e2 * s2;
    F::lit(0.5) * (b + (b * b + F::lit(4.0) * e2 * z2 * s2).sqrt())
}

/// Predictive-sampling variance `η²Σ² / (η²Σ + x*)`; zero when both terms vanish.
pub fn ps_sampling_variance<F: Scalar>(eta: F, var: F, x_star: F) -> F {
    let e2 = eta * eta;
    let den = e2 * var + x_star;
    if den > F::zero() {
        e2 * var * var / den
    } else {
        F::zero()
    }
}

macro_rules! bandit_agent {
    ($name:ident) => {
        impl<F: Scalar> $name<F> {
            pub fn posterior(&self) -> &ArmPosterior<F> {
                &self.post
            }

            /// Whether the most recent action maximized the posterior mean.
            pub fn last_action_greedy(&self) -> bool {
                self.last_greedy
            }
        }

        impl<F: Scalar> Agent<F> for $name<F> {
            type Action = usize;
            type Observation = F;

            fn action_space(&self) -> Space {
                Space::Discrete(self.post.arms())
            }

            fn observation_space(&self) -> Space {
                Space::Real
            }

            fn reset(&mut self, _initial: Option<&F>, _rng: &mut RngStream) {
                self.post.clear();
                self.last_greedy = false;
            }

            fn act(&mut self, rng: &mut RngStream) -> usize {
                let a = self.choose(rng);
                self.last_greedy = is_argmax(&self.post.mu, a);
                a
            }

            fn update(&mut self, arm: &usize, _obs: &F, reward: F, _rng: &mut RngStream) -> Result<()> {
                self.post.ts_update(*arm, reward)
            }

            fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
                out.push(("greedy", if self.last_greedy { F::one() } else { F::zero() }));
            }
        }
    };
}

/// Thompson sampling: sample each arm from its posterior, pull the best draw.
#[derive(Clone, Debug, PartialEq)]
pub struct TsAgent<F> {
    post: ArmPosterior<F>,
    last_greedy: bool,
}

impl<F: Scalar> TsAgent<F> {
    pub fn new(post: ArmPosterior<F>) -> Self {
        Self { post, last_greedy: false }
    }

    pub fn ts_act(&self, rng: &mut RngStream) -> usize {
        self.post.draw(self.post.var.iter().copied(), rng)
    }

    fn choose(&self, rng: &mut RngStream) -> usize {
        self.ts_act(rng)
    }
}

bandit_agent!(TsAgent);

/// Predictive sampling: like Thompson sampling but with the sampling variance
/// shrunk toward zero as information about an arm becomes less durable.
#[derive(Clone, Debug, PartialEq)]
pub struct PsAgent<F> {
    post: ArmPosterior<F>,
    pub x_star: F,
    last_greedy: bool,
}

impl<F: Scalar> PsAgent<F> {
    pub fn new(post: ArmPosterior<F>) -> Self {
        let x_star = ps_x_star(post.eta, post.zeta, post.sigma);
        Self { post, x_star, last_greedy: false }
    }

    /// Sampling variances `Σ̃` for every arm.
    pub fn sampling_variances(&self) -> Vec<F> {
        self.post.var.iter().map(|&v| ps_sampling_variance(self.post.eta, v, self.x_star)).collect()
    }

    pub fn ps_act(&self, rng: &mut RngStream) -> usize {
        self.post.draw(self.sampling_variances().into_iter(), rng)
    }

    fn choose(&self, rng: &mut RngStream) -> usize {
        self.ps_act(rng)
    }
}

bandit_agent!(PsAgent);
