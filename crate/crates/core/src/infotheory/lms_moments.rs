//! Stationary second moments of noisy LMS tracking a unit-variance AR(1)
//! signal, and the closed forms built on them.
//!
//! Model: `θ_{t+1} = ηθ_t + V`, `V ~ N(0, 1−η²)`, `Y_{t+1} = θ_t + W`,
//! `W ~ N(0, σ²)`, agent `U_{t+1} = α'U_t + αY_{t+1} + Q`, `Q ~ N(0, δ²)`,
//! with `α' = 1 − α`.

use crate::error::{arg, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::gaussian::{gaussian_cond_mi, GaussianJointModel};

/// Below this gap `(ηⁱ − α'ⁱ)/(η − α')` switches to its limit `iηⁱ⁻¹`.
pub const COINCIDENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmsSteadyCovariance<F> {
    pub eta: F,
    pub sigma: F,
    pub alpha: F,
    pub delta: F,
}

/// Validates parameters and returns the stationary moment evaluator.
pub fn steady_cov<F: Scalar>(eta: F, sigma: F, alpha: F, delta: F) -> Result<LmsSteadyCovariance<F>> {
    if !(eta >= F::zero() && eta < F::one()) {
        return arg(format!("eta must lie in [0, 1), got {eta}"));
    }
    if !(alpha > F::zero() && alpha <= F::one()) {
        return arg(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(sigma >= F::zero()) || !(delta >= F::zero()) || !sigma.is_finite() || !delta.is_finite() {
        return arg(format!("sigma and delta must be finite and nonnegative, got {sigma} and {delta}"));
    }
    Ok(LmsSteadyCovariance { eta, sigma, alpha, delta })
}

/// `(xⁱ − yⁱ)/(x − y)`, continuous across `x = y`.
fn power_gap<F: Scalar>(x: F, y: F, i: i32) -> F {
    if i == 0 {
        return F::zero();
    }
    if (x - y).abs() < F::lit(COINCIDENT_TOL) {
        F::count(i as usize) * x.powi(i - 1)
    } else {
        (x.powi(i) - y.powi(i)) / (x - y)
    }
}

impl<F: Scalar> LmsSteadyCovariance<F> {
    pub fn alpha_prime(&self) -> F {
        F::one() - self.alpha
    }

    pub fn y_var(&self) -> F {
        F::one() + self.sigma * self.sigma
    }

    /// `E[Y_t Y_{t+k}]`.
    pub fn yy(&self, k: usize) -> F {
        if k == 0 {
            self.y_var()
        } else {
            self.eta.powi(k as i32)
        }
    }

    pub fn u_var(&self) -> F {
        let (a, ap, e, s2, d2) = self.parts();
        let one = F::one();
        a * (s2 * (one - ap * e) + one + ap * e) / ((one - ap * e) * (one + ap)) + d2 / (one - ap * ap)
    }

    /// `E[U_t U_{t+1}]` as printed; equals `uu(1)`.
    pub fn uu1(&self) -> F {
        let (a, ap, e, s2, d2) = self.parts();
        let one = F::one();
        a * (ap * s2 * (one - ap * e) + ap + e) / ((one - ap * e) * (one + ap)) + ap * d2 / (one - ap * ap)
    }

    /// `E[U_t U_{t+k}]` for any lag.
    pub fn uu(&self, k: usize) -> F {
        let ap = self.alpha_prime();
        let mut acc = self.u_var();
        for j in 1..=k {
            acc = ap * acc + self.alpha * self.u_then_y(j);
        }
        acc
    }

    /// `E[U_{t+k} Y_t]` for `k ≥ 0` (state no earlier than the observation).
    pub fn y_then_u(&self, k: usize) -> F {
        let (a, ap, e, s2, _) = self.parts();
        let k = k as i32;
        a * s2 * ap.powi(k) + a / (F::one() - e * ap) * (power_gap(e, ap, k + 1) - e * e * ap * power_gap(e, ap, k))
    }

    /// `E[U_t Y_{t+k}]` for `k ≥ 1` (observation strictly after the state).
    pub fn u_then_y(&self, k: usize) -> F {
        debug_assert!(k >= 1);
        let (a, ap, e, _, _) = self.parts();
        a * e.powi(k as i32) / (F::one() - ap * e)
    }

    /// `E[U_a Y_b]` for arbitrary integer times.
    pub fn uy_at(&self, a: i64, b: i64) -> F {
        if a >= b {
            self.y_then_u((a - b) as usize)
        } else {
            self.u_then_y((b - a) as usize)
        }
    }

    fn parts(&self) -> (F, F, F, F, F) {
        (self.alpha, self.alpha_prime(), self.eta, self.sigma * self.sigma, self.delta * self.delta)
    }

    /// Stationary covariance of the listed coordinates.
    pub fn joint(&self, coords: &[Coord]) -> Matrix<F> {
        let n = coords.len();
        let max_lag =
            coords.iter().map(|c| c.time()).max().unwrap_or(0) - coords.iter().map(|c| c.time()).min().unwrap_or(0);
        let uu: Vec<F> = {
            let ap = self.alpha_prime();
            let mut v = Vec::with_capacity(max_lag as usize + 1);
            let mut acc = self.u_var();
            v.push(acc);
            for j in 1..=max_lag as usize {
                acc = ap * acc + self.alpha * self.u_then_y(j);
                v.push(acc);
            }
            v
        };
        Matrix::from_fn(n, n, |i, j| match (coords[i], coords[j]) {
            (Coord::U(a), Coord::U(b)) => uu[(a - b).unsigned_abs() as usize],
            (Coord::Y(a), Coord::Y(b)) => self.yy((a - b).unsigned_abs() as usize),
            (Coord::U(a), Coord::Y(b)) | (Coord::Y(b), Coord::U(a)) => self.uy_at(a, b),
        })
    }

    pub fn model(&self, coords: &[Coord]) -> Result<GaussianJointModel<F>> {
        GaussianJointModel::new(coords.iter().map(Coord::label).collect(), self.joint(coords))
    }

    /// Regression coefficient of `Y_{t+1}` on `U_t` and the residual variance.
    pub fn posterior_pred_params(&self) -> (F, F) {
        posterior_pred_params(self.alpha, self.eta, self.sigma, self.delta)
    }

    /// `I(U_t; Y_{t−n+1:t})` under the stationary law.
    pub fn mi_capacity(&self, n: usize) -> Result<F> {
        if n == 0 {
            return arg("history length must be at least 1");
        }
        let mut coords = vec![Coord::U(0)];
        coords.extend((0..n as i64).map(|i| Coord::Y(-i)));
        let m = self.model(&coords)?;
        let ys: Vec<usize> = (1..=n).collect();
        gaussian_cond_mi(&m, &[0], &ys, &[])
    }
}

/// A coordinate of the stationary agent-state/observation process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    U(i64),
    Y(i64),
}

impl Coord {
    pub fn time(&self) -> i64 {
        match *self {
            Coord::U(t) | Coord::Y(t) => t,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Coord::U(t) => format!("U[{t}]"),
            Coord::Y(t) => format!("Y[{t}]"),
        }
    }
}

/// Slope `μ/U_t` and variance `Δ²` of the stationary law of `Y_{t+1}` given `U_t`.
pub fn posterior_pred_params<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F) -> (F, F) {
    let one = F::one();
    let ap = one - alpha;
    let (a2, s2, d2) = (alpha * alpha, sigma * sigma, delta * delta);
    let slope =
        alpha * eta * (one - ap * ap) / (a2 * s2 * (one - ap * eta) + a2 * (one + ap * eta) + d2 * (one - ap * eta));
    let g = one - ap * eta;
    let var =
        one + s2 - a2 * eta * eta * (one - ap * ap) / (a2 * s2 * g * g + a2 * (one - ap * ap * eta * eta) + d2 * g * g);
    (slope, var)
}

fn capacity_factor<F: Scalar>(capacity: F) -> Result<F> {
    if !(capacity > F::zero()) {
        return arg(format!("capacity must be positive, got {capacity}"));
    }
    if capacity.is_infinite() {
        return Ok(F::zero());
    }
    // e^{-2C} / (1 - e^{-2C}) = 1 / (e^{2C} - 1)
    Ok(F::one() / (F::lit(2.0) * capacity).exp_m1())
}

/// Smallest quantization noise variance `δ²` keeping `I(U_t; H_t) ≤ C`.
/// `C = +∞` gives zero noise.
pub fn delta_star_sq<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F) -> Result<F> {
    let k = capacity_factor(capacity)?;
    let one = F::one();
    let ap = one - alpha;
    let g = one - ap * eta;
    Ok(alpha * alpha * (sigma * sigma * g + one + ap * eta) / g * k)
}

/// `δ*`, the standard deviation matching [`delta_star_sq`].
pub fn delta_star<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F) -> Result<F> {
    delta_star_sq(alpha, eta, sigma, capacity).map(F::sqrt)
}

/// Derivative of [`delta_star_sq`] with respect to `α`.
pub fn delta_star_sq_dalpha<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F) -> Result<F> {
    let k = capacity_factor(capacity)?;
    let one = F::one();
    let ap = one - alpha;
    let s2 = sigma * sigma;
    let d = one - ap * eta;
    let n = s2 * d + one + ap * eta;
    // dN/dα = η(σ² − 1), dD/dα = η
    let dn = eta * (s2 - one);
    let dd = eta;
    Ok(k * (F::lit(2.0) * alpha * n / d + alpha * alpha * (dn * d - n * dd) / (d * d)))
}

/// `I(U_t; Y_{t−n+1:t})` with `δ` given directly.
pub fn mi_capacity<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F, n: usize) -> Result<F> {
    steady_cov(eta, sigma, alpha, delta)?.mi_capacity(n)
}

/// Stepsize minimizing stationary one-step prediction error of noiseless LMS.
pub fn optimal_alpha<F: Scalar>(eta: F, sigma: F) -> Result<F> {
    if !(eta > F::zero() && eta < F::one()) {
        return arg(format!("eta must lie in (0, 1), got {eta}"));
    }
    if !(sigma > F::zero()) {
        return arg(format!("sigma must be positive, got {sigma}"));
    }
    let s2 = sigma * sigma;
    let rhs = eta + eta.recip() + (s2 * eta).recip() - eta / s2;
    let two = F::lit(2.0);
    // smaller root of x² − rhs·x + 1, written to avoid cancellation
    let root = two / (rhs + (rhs * rhs - F::lit(4.0)).sqrt());
    Ok(F::one() - root)
}
