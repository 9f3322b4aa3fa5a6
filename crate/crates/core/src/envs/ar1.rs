use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

/// Scalar latent AR(1) signal observed in Gaussian noise.
///
/// Each step advances `θ ← ηθ + V`, `V ~ N(0, ζ²)`, and emits `Y = θ + W`,
/// `W ~ N(0, σ²)`. As an environment the action is a prediction of `Y` and
/// the reward is the negative squared error.
#[derive(Clone, Debug)]
pub struct Ar1ScalarEnv<F> {
    pub eta: F,
    pub zeta: F,
    pub sigma: F,
    pub mu0: F,
    /// Prior variance of `θ_0`.
    pub sigma0: F,
    theta: F,
    fixed_start: Option<F>,
    started: bool,
}

impl<F: Scalar> Ar1ScalarEnv<F> {
    pub fn new(eta: F, zeta: F, sigma: F, mu0: F, sigma0: F) -> Result<Self> {
        if !(eta >= F::zero() && eta <= F::one()) {
            return arg(format!("eta must lie in [0, 1], got {eta}"));
        }
        if !(zeta >= F::zero() && sigma >= F::zero() && sigma0 >= F::zero()) {
            return arg("noise scales and prior variance must be nonnegative");
        }
        Ok(Self { eta, zeta, sigma, mu0, sigma0, theta: mu0, fixed_start: None, started: false })
    }

    /// Unit-variance stationary signal: `ζ² = 1 − η²`, `θ_0 ~ N(0, 1)`.
    pub fn stationary(eta: F, sigma: F) -> Result<Self> {
        Self::new(eta, (F::one() - eta * eta).max(F::zero()).sqrt(), sigma, F::zero(), F::one())
    }

    /// Starts every episode from the given `θ_0` instead of a prior draw.
    pub fn with_initial_theta(mut self, theta0: F) -> Self {
        self.fixed_start = Some(theta0);
        self
    }

    pub fn theta(&self) -> F {
        self.theta
    }

    fn start(&mut self, rng: &mut RngStream) {
        self.theta = match self.fixed_start {
            Some(t) => t,
            None => F::normal(self.mu0, self.sigma0.sqrt(), rng),
        };
        self.started = true;
    }

    /// Advances the latent signal and returns the next observation.
    pub fn ar1_step(&mut self, rng: &mut RngStream) -> F {
        if !self.started {
            self.start(rng);
        }
        self.theta = self.eta * self.theta + self.zeta * F::standard_normal(rng);
        self.theta + self.sigma * F::standard_normal(rng)
    }
}

impl<F: Scalar> Environment<F> for Ar1ScalarEnv<F> {
    type Action = F;
    type Observation = F;

    fn action_space(&self) -> Space {
        Space::Real
    }

    fn observation_space(&self) -> Space {
        Space::Real
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<F> {
        self.start(rng);
        None
    }

    fn step(&mut self, prediction: &F, rng: &mut RngStream) -> Result<(F, F)> {
        let y = self.ar1_step(rng);
        let err = y - *prediction;
        Ok((y, -(err * err)))
    }
}
