//! Exact planning on small tabular MDPs.

pub mod belief;

use crate::error::{arg, Error, Result};
use crate::scalar::Scalar;

pub use belief::{belief_value_iteration, BeliefPolicy, CoinChoice};

/// Row-sum tolerance for transition distributions.
pub const ROW_TOL: f64 = 1e-12;

/// Finite MDP with transition tensor `P[s][a][s']` and rewards `r(s, a, s')`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularMdp<F> {
    states: usize,
    actions: usize,
    p: Vec<F>,
    r: Vec<F>,
    pub gamma: F,
}

impl<F: Scalar> TabularMdp<F> {
    /// `p` and `r` are laid out as `[(s * actions + a) * states + s']`.
    pub fn new(states: usize, actions: usize, p: Vec<F>, r: Vec<F>, gamma: F) -> Result<Self> {
        let n = states * actions * states;
        if states == 0 || actions == 0 || p.len() != n || r.len() != n {
            return arg(format!("expected {n} transition and reward entries"));
        }
        if !(gamma > F::zero() && gamma < F::one()) {
            return arg(format!("discount must lie in (0, 1), got {gamma}"));
        }
        let mdp = Self { states, actions, p, r, gamma };
        for s in 0..states {
            for a in 0..actions {
                check_row(mdp.row(s, a)).map_err(|e| Error::Argument(format!("row ({s}, {a}): {e}")))?;
            }
        }
        Ok(mdp)
    }

    /// MDP paying `unit` on every transition into `goal`.
    pub fn with_goal(states: usize, actions: usize, p: Vec<F>, goal: usize, unit: F, gamma: F) -> Result<Self> {
        if goal >= states {
            return arg(format!("goal {goal} out of range"));
        }
        let r = (0..states * actions * states).map(|i| if i % states == goal { unit } else { F::zero() }).collect();
        Self::new(states, actions, p, r, gamma)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn row(&self, s: usize, a: usize) -> &[F] {
        let i = (s * self.actions + a) * self.states;
        &self.p[i..i + self.states]
    }

    pub fn transitions(&self) -> &[F] {
        &self.p
    }

    fn expected_reward(&self) -> Vec<F> {
        (0..self.states * self.actions)
            .map(|sa| {
                let i = sa * self.states;
                (0..self.states).map(|k| self.p[i + k] * self.r[i + k]).sum()
            })
            .collect()
    }

    /// One application of the Bellman optimality operator.
    pub fn bellman(&self, q: &[F]) -> Vec<F> {
        let rbar = self.expected_reward();
        self.bellman_with(q, &rbar)
    }

    fn bellman_with(&self, q: &[F], rbar: &[F]) -> Vec<F> {
        let v: Vec<F> = (0..self.states).map(|s| max_of(&q[s * self.actions..(s + 1) * self.actions])).collect();
        (0..self.states * self.actions)
            .map(|sa| {
                let row = &self.p[sa * self.states..(sa + 1) * self.states];
                rbar[sa] + self.gamma * row.iter().zip(&v).map(|(&p, &x)| p * x).sum::<F>()
            })
            .collect()
    }
}

pub(crate) fn check_row<F: Scalar>(row: &[F]) -> std::result::Result<(), String> {
    if row.iter().any(|&x| !(x >= F::zero()) || !x.is_finite()) {
        return Err("negative or non-finite probability".into());
    }
    let sum: F = row.iter().copied().sum();
    if (sum - F::one()).abs() > F::lit(ROW_TOL).max(F::epsilon() * F::count(row.len())) {
        return Err(format!("probabilities sum to {sum}"));
    }
    Ok(())
}

fn max_of<F: Scalar>(xs: &[F]) -> F {
    xs.iter().copied().fold(F::neg_infinity(), F::max)
}

/// Index of the first maximal entry.
pub fn first_argmax<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

const MAX_SWEEPS: usize = 1_000_000;

/// Optimal action values to sup-norm Bellman residual below `tol`.
/// Returns the table laid out as `[s * actions + a]`.
pub fn value_iteration<F: Scalar>(mdp: &TabularMdp<F>, tol: F) -> Result<Vec<F>> {
    value_iteration_logged(mdp, tol).map(|(q, _)| q)
}

/// [`value_iteration`] that also returns the sup-norm gap between successive iterates.
pub fn value_iteration_logged<F: Scalar>(mdp: &TabularMdp<F>, tol: F) -> Result<(Vec<F>, Vec<F>)> {
    if !(tol > F::zero()) {
        return arg("tolerance must be positive");
    }
    let rbar = mdp.expected_reward();
    let mut q = vec![F::zero(); mdp.states * mdp.actions];
    let mut gaps = Vec::new();
    for _ in 0..MAX_SWEEPS {
        let next = mdp.bellman_with(&q, &rbar);
        let gap = next.iter().zip(&q).map(|(a, b)| (*a - *b).abs()).fold(F::zero(), F::max);
        gaps.push(gap);
        q = next;
        // the residual of the new iterate is at most γ·gap
        if mdp.gamma * gap < tol {
            return Ok((q, gaps));
        }
    }
    Err(Error::Numeric("value iteration did not converge".into()))
}

/// Greedy policy of `q`, breaking ties toward the lowest action index.
pub fn greedy_policy<F: Scalar>(mdp: &TabularMdp<F>, q: &[F]) -> Vec<usize> {
    (0..mdp.states).map(|s| first_argmax(&q[s * mdp.actions..(s + 1) * mdp.actions])).collect()
}

/// Long-run state occupancy of the greedy policy of `q`, started uniformly.
pub fn greedy_stationary_distribution<F: Scalar>(mdp: &TabularMdp<F>, q: &[F]) -> Vec<F> {
    let pi = greedy_policy(mdp, q);
    let n = mdp.states;
    let mut chain = vec![F::zero(); n * n];
    for s in 0..n {
        chain[s * n..(s + 1) * n].copy_from_slice(mdp.row(s, pi[s]));
    }
    let start = vec![F::one() / F::count(n); n];
    cesaro_limit(&chain, &start)
}

const CESARO_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 64;

/// `lim_N (1/N) Σ_{k<N} μ Pᵏ` for a row-stochastic `n × n` matrix.
///
/// Uses the doubling identity `C_{2N} = (C_N + P^N C_N)/2`, which reaches
/// averages over `2^40` steps in 40 matrix products and handles periodic
/// and reducible chains alike.
pub fn cesaro_limit<F: Scalar>(chain: &[F], start: &[F]) -> Vec<F> {
    let n = start.len();
    let mut avg = identity(n);
    let mut power = chain.to_vec();
    let mut prev = start.to_vec();
    for _ in 0..MAX_DOUBLINGS {
        let shifted = matmul(&power, &avg, n);
        for (a, s) in avg.iter_mut().zip(&shifted) {
            *a = (*a + *s) * F::lit(0.5);
        }
        power = matmul(&power, &power, n);
        // squaring doubles any row-sum rounding error, so restore stochasticity
        normalize_rows(&mut power, n);
        normalize_rows(&mut avg, n);
        let d = vec_mat(start, &avg, n);
        let change = d.iter().zip(&prev).map(|(a, b)| (*a - *b).abs()).fold(F::zero(), F::max);
        prev = d;
        if change < F::lit(CESARO_TOL) * F::lit(0.01) {
            break;
        }
    }
    let total: F = prev.iter().copied().sum();
    prev.iter().map(|&x| x / total).collect()
}

fn normalize_rows<F: Scalar>(m: &mut [F], n: usize) {
    for row in m.chunks_mut(n) {
        let total: F = row.iter().copied().sum();
        if total > F::zero() {
            row.iter_mut().for_each(|x| *x = *x / total);
        }
    }
}

fn identity<F: Scalar>(n: usize) -> Vec<F> {
    let mut m = vec![F::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = F::one();
    }
    m
}

fn matmul<F: Scalar>(a: &[F], b: &[F], n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == F::zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + x * b[k * n + j];
            }
        }
    }
    out
}

fn vec_mat<F: Scalar>(v: &[F], m: &[F], n: usize) -> Vec<F> {
    (0..n).map(|j| (0..n).map(|i| v[i] * m[i * n + j]).sum()).collect()
}

/// Tolerance for value iteration inside reward scaling.
pub const SCALING_VI_TOL: f64 = 1e-8;
/// Goal mass below which the greedy policy is considered unable to reach the goal.
pub const MIN_GOAL_MASS: f64 = 1e-9;
/// Long-run reward level the scaled goal reward aims for.
pub const TARGET_AVERAGE_REWARD: f64 = 0.5;

/// Stationary goal mass of the greedy policy for an MDP paying `unit` on
/// entering `goal` (discount taken from `mdp`).
pub fn goal_stationary_mass<F: Scalar>(mdp: &TabularMdp<F>, goal: usize, unit: F) -> Result<F> {
    let unit_mdp = TabularMdp::with_goal(mdp.states, mdp.actions, mdp.p.clone(), goal, unit, mdp.gamma)?;
    let q = value_iteration(&unit_mdp, F::lit(SCALING_VI_TOL))?;
    Ok(greedy_stationary_distribution(&unit_mdp, &q)[goal])
}

/// Goal reward `0.5 / d_g`, where `d_g` is the goal's long-run mass under
/// the policy that is greedy for unit goal reward at the MDP's discount.
pub fn scale_goal_reward<F: Scalar>(mdp: &TabularMdp<F>, goal: usize) -> Result<F> {
    let mass = goal_stationary_mass(mdp, goal, F::one())?;
    if !(mass >= F::lit(MIN_GOAL_MASS)) {
        return Err(Error::DegenerateMdp { mass: mass.to_f64_lossy() });
    }
    Ok(F::lit(TARGET_AVERAGE_REWARD) / mass)
}
