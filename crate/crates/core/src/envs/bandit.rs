use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

/// AR(1) law of one arm's latent mean reward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmProcess<F> {
    pub eta: F,
    pub zeta: F,
    pub mu0: F,
    /// Prior variance of `θ_0`.
    pub sigma0: F,
}

impl<F: Scalar> ArmProcess<F> {
    /// Unit-variance stationary arm: `ζ² = 1 − η²`, `θ_0 ~ N(0, 1)`.
    pub fn stationary(eta: F) -> Self {
        Self { eta, zeta: (F::one() - eta * eta).max(F::zero()).sqrt(), mu0: F::zero(), sigma0: F::one() }
    }
}

/// Multi-armed bandit with independently drifting Gaussian arm means.
///
/// Pulling arm `a` pays `θ_a + W`, `W ~ N(0, σ²)`; afterwards every arm,
/// pulled or not, moves by `θ ← ηθ + Z`, `Z ~ N(0, ζ²)`.
#[derive(Clone, Debug)]
pub struct GaussianAr1BanditEnv<F> {
    arms: Vec<ArmProcess<F>>,
    pub sigma: F,
    theta: Vec<F>,
}

impl<F: Scalar> GaussianAr1BanditEnv<F> {
    pub fn new(arms: Vec<ArmProcess<F>>, sigma: F) -> Result<Self> {
        if arms.is_empty() {
            return arg("need at least one arm");
        }
        if arms.iter().any(|a| !(a.zeta >= F::zero() && a.sigma0 >= F::zero())) || !(sigma >= F::zero()) {
            return arg("noise scales must be nonnegative");
        }
        let theta = arms.iter().map(|a| a.mu0).collect();
        Ok(Self { arms, sigma, theta })
    }

    /// `k` identical stationary arms.
    pub fn stationary(k: usize, eta: F, sigma: F) -> Result<Self> {
        Self::new(vec![ArmProcess::stationary(eta); k], sigma)
    }

    pub fn theta(&self) -> &[F] {
        &self.theta
    }

    pub fn set_theta(&mut self, theta: &[F]) {
        self.theta.copy_from_slice(theta);
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn bandit_step(&mut self, arm: usize, rng: &mut RngStream) -> Result<F> {
        if arm >= self.arms.len() {
            return arg(format!("arm {arm} does not exist ({} arms)", self.arms.len()));
        }
        let reward = self.theta[arm] + self.sigma * F::standard_normal(rng);
        for (th, p) in self.theta.iter_mut().zip(&self.arms) {
            *th = p.eta * *th + p.zeta * F::standard_normal(rng);
        }
        Ok(reward)
    }
}

impl<F: Scalar> Environment<F> for GaussianAr1BanditEnv<F> {
    type Action = usize;
    type Observation = F;

    fn action_space(&self) -> Space {
        Space::Discrete(self.arms.len())
    }

    fn observation_space(&self) -> Space {
        Space::Real
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<F> {
        for (th, p) in self.theta.iter_mut().zip(&self.arms) {
            *th = F::normal(p.mu0, p.sigma0.sqrt(), rng);
        }
        None
    }

    fn step(&mut self, arm: &usize, rng: &mut RngStream) -> Result<(F, F)> {
        let r = self.bandit_step(*arm, rng)?;
        Ok((r, r))
    }
}
