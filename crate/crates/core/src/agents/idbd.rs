use crate::error::{arg, Error, Result};
use crate::infotheory::{delta_star, delta_star_sq_dalpha};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Agent, Space};

/// Bounds on the log-stepsize `β = ln α`.
pub const LOG_STEP_MIN: f64 = -12.0;
pub const LOG_STEP_MAX: f64 = 0.0;

/// How the state noise is chosen while the stepsize adapts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IdbdMode<F> {
    /// Fixed noise standard deviation.
    Standard { delta: F },
    /// Noise tracks `δ*(α)` for the given process and capacity, and the
    /// meta-gradient includes the capacity cost of a larger stepsize.
    CapacityConstrained { eta: F, sigma: F, capacity: F },
}

/// Scalar LMS whose stepsize is adapted online by incremental delta-bar-delta.
#[derive(Clone, Debug, PartialEq)]
pub struct IdbdAgent<F> {
    pub u: F,
    pub beta: F,
    pub h: F,
    pub zeta_meta: F,
    pub mode: IdbdMode<F>,
    alpha0: F,
    delta: F,
}

impl<F: Scalar> IdbdAgent<F> {
    pub fn new(mode: IdbdMode<F>, zeta_meta: F, alpha0: F) -> Result<Self> {
        if !(alpha0 > F::zero() && alpha0 <= F::one()) {
            return arg(format!("initial stepsize must lie in (0, 1], got {alpha0}"));
        }
        if !(zeta_meta >= F::zero() && zeta_meta.is_finite()) {
            return arg(format!("meta stepsize must be finite and nonnegative, got {zeta_meta}"));
        }
        let mut agent =
            Self { u: F::zero(), beta: alpha0.ln(), h: F::zero(), zeta_meta, mode, alpha0, delta: F::zero() };
        agent.delta = agent.noise_level(alpha0)?;
        Ok(agent)
    }

    pub fn alpha(&self) -> F {
        self.beta.exp()
    }

    /// Noise standard deviation used by the last update.
    pub fn delta(&self) -> F {
        self.delta
    }

    fn noise_level(&self, alpha: F) -> Result<F> {
        match self.mode {
            IdbdMode::Standard { delta } => {
                if delta >= F::zero() && delta.is_finite() {
                    Ok(delta)
                } else {
                    arg(format!("noise level must be finite and nonnegative, got {delta}"))
                }
            }
            IdbdMode::CapacityConstrained { eta, sigma, capacity } => delta_star(alpha, eta, sigma, capacity),
        }
    }

    /// One step of meta-learning and prediction; returns `(U, α)`.
    pub fn idbd_update(&mut self, y: F, rng: &mut RngStream) -> Result<(F, F)> {
        let alpha_old = self.alpha();
        let err = y - self.u;
        let mut beta = self.beta + self.zeta_meta * err * self.h;
        if let IdbdMode::CapacityConstrained { eta, sigma, capacity } = self.mode {
            let slope = delta_star_sq_dalpha(alpha_old, eta, sigma, capacity)?;
            beta = beta - F::lit(0.5) * self.zeta_meta * alpha_old * slope;
        }
        if !beta.is_finite() {
            return Err(Error::Numeric(format!("log-stepsize became {beta}")));
        }
        self.beta = beta.max(F::lit(LOG_STEP_MIN)).min(F::lit(LOG_STEP_MAX));
        let alpha = self.alpha();
        self.delta = self.noise_level(alpha)?;
        self.u = self.u + alpha * err + self.delta * F::standard_normal(rng);
        self.h = alpha * err + (F::one() - alpha).max(F::zero()) * self.h;
        Ok((self.u, alpha))
    }
}

impl<F: Scalar> Agent<F> for IdbdAgent<F> {
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
        self.h = F::zero();
        self.beta = self.alpha0.ln();
        self.delta = self.noise_level(self.alpha0).unwrap_or(self.delta);
    }

    fn act(&mut self, _rng: &mut RngStream) -> F {
        self.u
    }

    fn update(&mut self, _action: &F, y: &F, _reward: F, rng: &mut RngStream) -> Result<()> {
        self.idbd_update(*y, rng).map(|_| ())
    }

    fn diagnostics(&self, out: &mut Vec<(&'static str, F)>) {
        out.push(("alpha", self.alpha()));
    }
}
