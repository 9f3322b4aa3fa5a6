use crate::error::{arg, Result};
use crate::infotheory::delta_star;
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

/// Which form of the LMS recursion to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShrinkageMode {
    /// `μ ← ημ + α(y − ημ)`, predicting `ημ`.
    Shrunk,
    /// `μ ← μ + α(y − μ)`, predicting `μ`.
    Plain,
}

/// Scalar least-mean-squares predictor for AR(1) observations.
#[derive(Clone, Debug, PartialEq)]
pub struct LmsAgent<F> {
    pub mu: F,
    pub alpha: F,
    pub eta: F,
    pub mode: ShrinkageMode,
}

impl<F: Scalar> LmsAgent<F> {
    pub fn new(alpha: F, eta: F, mode: ShrinkageMode) -> Result<Self> {
        let unit = |x: F| x >= F::zero() && x <= F::one();
        if !unit(alpha) || !unit(eta) {
            return arg(format!("stepsize and shrinkage must lie in [0, 1], got {alpha} and {eta}"));
        }
        Ok(Self { mu: F::zero(), alpha, eta, mode })
    }

    pub fn prediction(&self) -> F {
        match self.mode {
            ShrinkageMode::Shrunk => self.eta * self.mu,
            ShrinkageMode::Plain => self.mu,
        }
    }

    /// Absorbs `y` and returns the next prediction.
    pub fn lms_update(&mut self, y: F) -> F {
        let base = self.prediction();
        self.mu = base + self.alpha * (y - base);
        self.prediction()
    }
}

impl<F: Scalar> Agent<F> for LmsAgent<F> {
    type Action = F;
    type Observation = F;

    fn action_space(&self) -> Space {
        Space::Real
    }

    fn observation_space(&self) -> Space {
        Space::Real
    }

    fn reset(&mut self, _initial: Option<&F>, _rng: &mut RngStream) {
        self.mu = F::zero();
    }

    fn act(&mut self, _rng: &mut RngStream) -> F {
        self.prediction()
    }

    fn update(&mut self, _action: &F, y: &F, _reward: F, _rng: &mut RngStream) -> Result<()> {
        self.lms_update(*y);
        Ok(())
    }

    fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
        out.push(("mu", self.mu));
    }
}

/// LMS whose state is perturbed by Gaussian noise of standard deviation `δ`
/// after every update, modelling finite-precision storage.
///
/// With a capacity `C` the noise level is the one at which the state carries
/// exactly `C` nats about the observations of the configured AR(1) process.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityLmsAgent<F> {
    pub u: F,
    pub alpha: F,
    delta: F,
    capacity: Option<F>,
    last_noise: F,
}

impl<F: Scalar> CapacityLmsAgent<F> {
    pub fn with_delta(alpha: F, delta: F) -> Result<Self> {
        if !(alpha > F::zero() && alpha <= F::one()) {
            return arg(format!("stepsize must lie in (0, 1], got {alpha}"));
        }
        if !(delta >= F::zero() && delta.is_finite()) {
            return arg(format!("noise level must be finite and nonnegative, got {delta}"));
        }
        Ok(Self { u: F::zero(), alpha, delta, capacity: None, last_noise: F::zero() })
    }

    pub fn with_capacity(alpha: F, eta: F, sigma: F, capacity: F) -> Result<Self> {
        let delta = delta_star(alpha, eta, sigma, capacity)?;
        let mut agent = Self::with_delta(alpha, delta)?;
        agent.capacity = Some(capacity);
        Ok(agent)
    }

    pub fn delta(&self) -> F {
        self.delta
    }

    pub fn capacity(&self) -> Option<F> {
        self.capacity
    }

    /// Noise added by the most recent update.
    pub fn last_noise(&self) -> F {
        self.last_noise
    }

    pub fn capacity_lms_update(&mut self, y: F, rng: &mut RngStream) -> F {
        self.last_noise = self.delta * F::standard_normal(rng);
        self.u = self.u + self.alpha * (y - self.u) + self.last_noise;
        self.u
    }
}

impl<F: Scalar> Agent<F> for CapacityLmsAgent<F> {
    type Action = F;
    type Observation = F;

    fn action_space(&self) -> Space {
        Space::Real
    }

    fn observation_space(&self) -> Space {
        Space::Real
    }

    fn reset(&mut self, _initial: Option<&F>, _rng: &mut RngStream) {
        self.u = F::zero();
        self.last_noise = F::zero();
    }

    fn act(&mut self, _rng: &mut RngStream) -> F {
        self.u
    }

    fn update(&mut self, _action: &F, y: &F, _reward: F, rng: &mut RngStream) -> Result<()> {
        self.capacity_lms_update(*y, rng);
        Ok(())
    }

    fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
        out.push(("u", self.u));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shrunk_update_hand_value() {
        let mut a = LmsAgent::new(0.35f64, 0.9, ShrinkageMode::Shrunk).unwrap();
        let next = a.lms_update(1.0);
        assert!((a.mu - 0.35).abs() < 1e-15);
        assert!((next - 0.315).abs() < 1e-15);
    }

    #[test]
    fn degenerate_stepsizes() {
        let mut a = LmsAgent::new(0.0f64, 0.5, ShrinkageMode::Plain).unwrap();
        a.mu = 0.7;
        a.lms_update(5.0);
        assert_eq!(a.mu, 0.7);
        let mut b = LmsAgent::new(1.0f64, 0.5, ShrinkageMode::Shrunk).unwrap();
        b.mu = 3.0;
        b.lms_update(-2.0);
        assert_eq!(b.mu, -2.0);
        assert!(LmsAgent::new(1.5f64, 0.5, ShrinkageMode::Shrunk).is_err());
    }

    #[test]
    fn zero_noise_matches_plain_lms() {
        let mut plain = LmsAgent::new(0.3f64, 0.9, ShrinkageMode::Plain).unwrap();
        let mut noisy = CapacityLmsAgent::with_delta(0.3f64, 0.0).unwrap();
        let mut rng = RngStream::new(1, 2);
        for i in 0..100 {
            let y = (i as f64 * 0.37).sin();
            assert_eq!(plain.lms_update(y), noisy.capacity_lms_update(y, &mut rng));
        }
    }
}
