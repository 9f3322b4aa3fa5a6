//! Discounted planning for the two-coin game where coin 1 has a known bias
//! and coin 2 is a dyadic coin (bias 0 or 1) replaced with probability `q₂`
//! before every toss.
//!
//! The planner works on the belief `b = P(coin 2 has bias 1)` held at decision
//! time, discretized on a uniform grid with nearest-neighbour projection.

use crate::error::{arg, Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoinChoice {
    Known,
    Swapping,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeliefPolicy<F> {
    pub grid: Vec<F>,
    pub choice: Vec<CoinChoice>,
    pub values: Vec<F>,
}

impl<F: Scalar> BeliefPolicy<F> {
    pub fn nearest(&self, b: F) -> usize {
        nearest_index(b, self.grid.len())
    }

    pub fn choose(&self, b: F) -> CoinChoice {
        self.choice[self.nearest(b)]
    }
}

fn nearest_index<F: Scalar>(b: F, n: usize) -> usize {
    let x = (b.max(F::zero()).min(F::one()) * F::count(n - 1)).round();
    x.to_usize().unwrap_or(0).min(n - 1)
}

/// Belief after the replacement step: `(1 − q)b + q/2`.
pub fn drift<F: Scalar>(b: F, q2: F) -> F {
    (F::one() - q2) * b + q2 * F::lit(0.5)
}

const VI_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 10_000_000;

/// Solves the belief MDP by value iteration and returns the greedy policy.
/// Ties go to the known coin.
pub fn belief_value_iteration<F: Scalar>(p1: F, q2: F, gamma: F, grid_size: usize) -> Result<BeliefPolicy<F>> {
    if grid_size < 2 {
        return arg("belief grid needs at least 2 points");
    }
    let unit = |x: F| x >= F::zero() && x <= F::one();
    if !unit(p1) || !unit(q2) {
        return arg("p1 and q2 must lie in [0, 1]");
    }
    if !(gamma > F::zero() && gamma < F::one()) {
        return arg("discount must lie in (0, 1)");
    }
    let n = grid_size;
    let grid: Vec<F> = (0..n).map(|i| F::count(i) / F::count(n - 1)).collect();
    let stay: Vec<usize> = grid.iter().map(|&b| nearest_index(drift(b, q2), n)).collect();
    let heads = nearest_index(drift(F::one(), q2), n);
    let tails = nearest_index(drift(F::zero(), q2), n);

    let mut v = vec![F::zero(); n];
    let q_values = |v: &[F], i: usize| {
        let b = grid[i];
        let known = p1 + gamma * v[stay[i]];
        let swap = b + gamma * (b * v[heads] + (F::one() - b) * v[tails]);
        (known, swap)
    };
    let tol = F::lit(VI_TOL) * (F::one() - gamma);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut gap = F::zero();
        let next: Vec<F> = (0..n)
            .map(|i| {
                let (k, s) = q_values(&v, i);
                let x = k.max(s);
                gap = gap.max((x - v[i]).abs());
                x
            })
            .collect();
        v = next;
        if gap < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric("belief value iteration did not converge".into()));
    }
    let eps = F::lit(1e-12) * (F::one() + v.iter().copied().fold(F::zero(), F::max));
    let choice = (0..n)
        .map(|i| {
            let (k, s) = q_values(&v, i);
            if s > k + eps {
                CoinChoice::Swapping
            } else {
                CoinChoice::Known
            }
        })
        .collect();
    Ok(BeliefPolicy { grid, choice, values: v })
}

/// Beliefs reachable from `b0` under any sequence of choices and outcomes,
/// as grid indices.
pub fn reachable_beliefs<F: Scalar>(policy: &BeliefPolicy<F>, b0: F, q2: F) -> Vec<usize> {
    let n = policy.grid.len();
    let mut seen = vec![false; n];
    let mut stack = vec![policy.nearest(b0)];
    let heads = nearest_index(drift(F::one(), q2), n);
    let tails = nearest_index(drift(F::zero(), q2), n);
    while let Some(i) = stack.pop() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let b = policy.grid[i];
        stack.push(nearest_index(drift(b, q2), n));
        if b > F::zero() {
            stack.push(heads);
        }
        if b < F::one() {
            stack.push(tails);
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_coin_dominates() {
        for q in [0.0f64, 0.001, 0.5, 1.0] {
            let p = belief_value_iteration(1.0f64, q, 0.95, 101).unwrap();
            assert!(p.choice.iter().all(|&c| c == CoinChoice::Known), "q = {q}");
        }
    }

    #[test]
    fn grid_must_have_two_points() {
        assert!(belief_value_iteration(0.8f64, 0.1, 0.9, 1).is_err());
    }

    #[test]
    fn drift_is_affine_toward_half() {
        let mut b = 1.0f64;
        for _ in 0..100 {
            b = drift(b, 0.001);
        }
        assert!((b - (0.5 + 0.5 * 0.999f64.powi(100))).abs() < 1e-14);
    }
}
