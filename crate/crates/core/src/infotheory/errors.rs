//! Forgetting and implasticity: how much predictive information a noisy LMS
//! state loses, split by where the loss happens.

use crate::error::{arg, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::gaussian::{gaussian_cond_mi, GaussianJointModel};
use super::lms_moments::{delta_star, steady_cov, Coord, LmsSteadyCovariance};

/// Longest truncated future or past window.
pub const MAX_HORIZON: usize = 512;
/// Tail mass at which infinite windows are truncated.
pub const TRUNCATION: f64 = 1e-6;

fn decay_horizon(rate: f64) -> usize {
    if rate <= 0.0 {
        return 1;
    }
    if rate >= 1.0 {
        return MAX_HORIZON;
    }
    ((TRUNCATION.ln() / rate.ln()).ceil() as usize).clamp(1, MAX_HORIZON)
}

/// Future window `K` with `η^K < 10⁻⁶`, capped at [`MAX_HORIZON`].
pub fn default_future_horizon(eta: f64) -> usize {
    decay_horizon(eta)
}

/// Past window over which both the signal and the agent memory decay below `10⁻⁶`.
pub fn default_past_horizon(alpha: f64, eta: f64) -> usize {
    decay_horizon(eta.max(1.0 - alpha))
}

impl<F: Scalar> LmsSteadyCovariance<F> {
    /// `I(Y_{t+1:t+K}; U_{t−1} | U_t, Y_t)`.
    pub fn forgetting(&self, future: usize) -> Result<F> {
        check_window(future)?;
        let mut coords = vec![Coord::U(-1), Coord::U(0), Coord::Y(0)];
        coords.extend((1..=future as i64).map(Coord::Y));
        let m = self.model(&coords)?;
        let fut: Vec<usize> = (3..coords.len()).collect();
        gaussian_cond_mi(&m, &fut, &[0], &[1, 2])
    }

    /// `I(Y_{t+1:t+K}; Y_t | U_t)`.
    pub fn implasticity(&self, future: usize) -> Result<F> {
        check_window(future)?;
        let mut coords = vec![Coord::U(0), Coord::Y(0)];
        coords.extend((1..=future as i64).map(Coord::Y));
        let m = self.model(&coords)?;
        let fut: Vec<usize> = (2..coords.len()).collect();
        gaussian_cond_mi(&m, &fut, &[1], &[0])
    }

    /// `I(Y_{t+1}; Y_{t−n+1:t} | U_t)`, the expected KL divergence between the
    /// history-conditioned and state-conditioned predictive laws.
    pub fn informational_error(&self, past: usize) -> Result<F> {
        check_window(past)?;
        let mut coords = vec![Coord::Y(1), Coord::U(0)];
        coords.extend((0..past as i64).map(|i| Coord::Y(-i)));
        let m = self.model(&coords)?;
        let hist: Vec<usize> = (2..coords.len()).collect();
        gaussian_cond_mi(&m, &[0], &hist, &[1])
    }
}

fn check_window(n: usize) -> Result<()> {
    if n == 0 {
        return arg("window length must be at least 1");
    }
    Ok(())
}

fn capacity_cov<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F) -> Result<LmsSteadyCovariance<F>> {
    steady_cov(eta, sigma, alpha, delta_star(alpha, eta, sigma, capacity)?)
}

/// Forgetting error of capacity-constrained LMS (δ = δ*(α, C)) over a
/// future window of `future` observations.
pub fn forgetting_error<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F, future: usize) -> Result<F> {
    capacity_cov(alpha, eta, sigma, capacity)?.forgetting(future)
}

/// Implasticity error of capacity-constrained LMS.
pub fn implasticity_error<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F, future: usize) -> Result<F> {
    capacity_cov(alpha, eta, sigma, capacity)?.implasticity(future)
}

/// Forgetting plus implasticity with default windows.
pub fn total_error<F: Scalar>(alpha: F, eta: F, sigma: F, capacity: F) -> Result<F> {
    let c = capacity_cov(alpha, eta, sigma, capacity)?;
    let k = default_future_horizon(eta.to_f64_lossy());
    Ok(c.forgetting(k)? + c.implasticity(k)?)
}

/// Per-lag forgetting and implasticity at a finite time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagTerm<F> {
    pub lag: usize,
    pub forgetting: F,
    pub implasticity: F,
}

/// Largest horizon accepted by [`lag_decomposition`].
pub const MAX_LAG_HORIZON: usize = 12;

/// Exact joint law of `(U_0, …, U_t, Y_1, …, Y_{t+1})` started from
/// `θ_0 ~ N(0, 1)` and `U_0 ~ N(0, 1)`, with the same noise law as the
/// stationary model. Coordinates `0..=t` are the states and `t+1..=2t+1`
/// the observations `Y_1..Y_{t+1}`.
pub fn finite_time_joint<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F, t: usize) -> Matrix<F> {
    // independent sources: θ_0, U_0, V_1..V_t, W_1..W_{t+1}, Q_1..Q_t
    let n_src = 2 + t + (t + 1) + t;
    let v_at = |s: usize| 2 + (s - 1);
    let w_at = |s: usize| 2 + t + (s - 1);
    let q_at = |s: usize| 2 + t + (t + 1) + (s - 1);
    let mut var = vec![F::zero(); n_src];
    var[0] = F::one();
    var[1] = F::one();
    for s in 1..=t {
        var[v_at(s)] = F::one() - eta * eta;
        var[q_at(s)] = delta * delta;
    }
    for s in 1..=t + 1 {
        var[w_at(s)] = sigma * sigma;
    }

    let ap = F::one() - alpha;
    let mut theta = vec![F::zero(); n_src];
    theta[0] = F::one();
    let mut u = vec![F::zero(); n_src];
    u[1] = F::one();
    let mut rows: Vec<Vec<F>> = vec![u.clone()];
    let mut ys: Vec<Vec<F>> = Vec::with_capacity(t + 1);
    for s in 1..=t + 1 {
        // Y_s = θ_{s−1} + W_s
        let mut y = theta.clone();
        y[w_at(s)] = y[w_at(s)] + F::one();
        ys.push(y.clone());
        if s <= t {
            for k in 0..n_src {
                u[k] = ap * u[k] + alpha * y[k];
            }
            u[q_at(s)] = u[q_at(s)] + F::one();
            rows.push(u.clone());
            for th in theta.iter_mut() {
                *th = eta * *th;
            }
            theta[v_at(s)] = theta[v_at(s)] + F::one();
        }
    }
    rows.extend(ys);
    let m = rows.len();
    Matrix::from_fn(m, m, |i, j| (0..n_src).map(|k| rows[i][k] * rows[j][k] * var[k]).sum())
}

/// Splits `I(Y_{t+1}; H_t | U_t)` at time `t` into forgetting and
/// implasticity contributions at lags `0..=t`.
pub fn lag_decomposition<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F, t: usize) -> Result<Vec<LagTerm<F>>> {
    steady_cov(eta, sigma, alpha, delta)?;
    if t > MAX_LAG_HORIZON {
        return arg(format!("lag decomposition supports t ≤ {MAX_LAG_HORIZON}, got {t}"));
    }
    let model = finite_time_model(alpha, eta, sigma, delta, t)?;
    let u = |i: usize| i;
    let y = |i: usize| t + i; // Y_i for i ≥ 1
    let target = [y(t + 1)];
    let mut terms = Vec::with_capacity(t + 1);
    for k in 0..=t {
        let j = t - k; // the update from U_{j−1} to U_j
        let later: Vec<usize> = ((j + 1)..=t).map(y).collect();
        let (forgetting, implasticity) = if j == 0 {
            (F::zero(), F::zero())
        } else {
            let mut given = vec![u(j), y(j)];
            given.extend(&later);
            let f = gaussian_cond_mi(&model, &target, &[u(j - 1)], &given)?;
            let mut given = vec![u(j)];
            given.extend(&later);
            let i = gaussian_cond_mi(&model, &target, &[y(j)], &given)?;
            (f, i)
        };
        terms.push(LagTerm { lag: k, forgetting, implasticity });
    }
    Ok(terms)
}

/// `I(Y_{t+1}; Y_{1:t} | U_t)` on the finite-time joint.
pub fn finite_time_error<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F, t: usize) -> Result<F> {
    let model = finite_time_model(alpha, eta, sigma, delta, t)?;
    let hist: Vec<usize> = (t + 1..=2 * t).collect();
    gaussian_cond_mi(&model, &[2 * t + 1], &hist, &[t])
}

fn finite_time_model<F: Scalar>(alpha: F, eta: F, sigma: F, delta: F, t: usize) -> Result<GaussianJointModel<F>> {
    let mut labels: Vec<String> = (0..=t).map(|i| format!("U[{i}]")).collect();
    labels.extend((1..=t + 1).map(|i| format!("Y[{i}]")));
    GaussianJointModel::new(labels, finite_time_joint(alpha, eta, sigma, delta, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::lms_moments::optimal_alpha;

    #[test]
    fn default_windows() {
        assert_eq!(default_future_horizon(0.9), 132);
        assert_eq!(default_future_horizon(0.0), 1);
        assert_eq!(default_future_horizon(0.999), MAX_HORIZON);
        assert_eq!(default_past_horizon(0.9, 0.5), 20);
    }

    #[test]
    fn no_forgetting_without_noise() {
        let c = steady_cov(0.9f64, 0.5, 0.4, 0.0).unwrap();
        assert!(c.forgetting(64).unwrap().abs() < 1e-9);
        let f = forgetting_error(0.4f64, 0.9, 0.5, f64::INFINITY, 64).unwrap();
        assert!(f.abs() < 1e-9);
    }

    #[test]
    fn windows_only_add_information() {
        let c = steady_cov(0.9f64, 0.5, 0.4, 0.3).unwrap();
        let f: Vec<f64> = [1, 8, 64].iter().map(|&k| c.forgetting(k).unwrap()).collect();
        assert!(f[0] <= f[1] + 1e-12 && f[1] <= f[2] + 1e-12, "{f:?}");
        let i: Vec<f64> = [1, 8, 64].iter().map(|&k| c.implasticity(k).unwrap()).collect();
        assert!(i[0] <= i[1] + 1e-12 && i[1] <= i[2] + 1e-12, "{i:?}");
    }

    #[test]
    fn split_adds_up_to_informational_error() {
        for &(a, e, s, d) in &[(0.3f64, 0.9, 0.5, 0.2), (0.6, 0.7, 1.0, 0.5), (0.8, 0.95, 0.5, 0.05)] {
            let c = steady_cov(e, s, a, d).unwrap();
            let k = default_future_horizon(e);
            let total = c.forgetting(k).unwrap() + c.implasticity(k).unwrap();
            let direct = c.informational_error(default_past_horizon(a, e)).unwrap();
            assert!((total - direct).abs() < 1e-6, "{a} {e}: {total} vs {direct}");
        }
    }

    #[test]
    fn noiseless_optimum_has_no_error() {
        let a = optimal_alpha(0.9f64, 0.5).unwrap();
        let c = steady_cov(0.9f64, 0.5, a, 0.0).unwrap();
        assert!(c.informational_error(64).unwrap() < 1e-9);
    }

    #[test]
    fn nearly_full_tracking_is_plastic() {
        let c = steady_cov(0.9f64, 0.05, 0.999, 0.0).unwrap();
        assert!(c.implasticity(132).unwrap() < 1e-2);
    }

    #[test]
    fn finite_joint_converges_to_stationary() {
        let (a, e, s, d) = (0.4f64, 0.8, 0.7, 0.3);
        let t = 120;
        let j = finite_time_joint(a, e, s, d, t);
        let c = steady_cov(e, s, a, d).unwrap();
        // U_t is index t, U_{t-1} is t-1, Y_i is t+i
        assert!((j[(t, t)] - c.u_var()).abs() < 1e-9);
        assert!((j[(t - 1, t)] - c.uu(1)).abs() < 1e-9);
        assert!((j[(t - 3, t)] - c.uu(3)).abs() < 1e-9);
        assert!((j[(t, 2 * t)] - c.y_then_u(0)).abs() < 1e-9);
        assert!((j[(t, 2 * t - 2)] - c.y_then_u(2)).abs() < 1e-9);
        assert!((j[(t, 2 * t + 1)] - c.u_then_y(1)).abs() < 1e-9);
        assert!((j[(2 * t + 1, 2 * t + 1)] - c.y_var()).abs() < 1e-12);
        assert!((j[(2 * t + 1, 2 * t - 1)] - e * e).abs() < 1e-12);
    }

    #[test]
    fn lag_terms_sum_to_total() {
        for t in [0usize, 1, 3, 8] {
            let terms = lag_decomposition(0.4f64, 0.8, 0.7, 0.3, t).unwrap();
            assert_eq!(terms.len(), t + 1);
            let sum: f64 = terms.iter().map(|x| x.forgetting + x.implasticity).sum();
            let total = finite_time_error(0.4f64, 0.8, 0.7, 0.3, t).unwrap();
            assert!((sum - total).abs() < 1e-9, "t={t}: {sum} vs {total}");
            assert_eq!(terms[t].forgetting, 0.0);
            assert_eq!(terms[t].implasticity, 0.0);
        }
        assert!(lag_decomposition(0.4f64, 0.8, 0.7, 0.3, 13).is_err());
    }

    #[test]
    fn noiseless_lags_never_forget() {
        let terms = lag_decomposition(0.5f64, 0.9, 0.5, 0.0, 6).unwrap();
        assert!(terms.iter().all(|x| x.forgetting.abs() < 1e-9));
    }
}
