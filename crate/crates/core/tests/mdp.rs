use contilab_core::envs::sample_dirichlet_row;
use contilab_core::mdp::belief::reachable_beliefs;
use contilab_core::mdp::*;
use contilab_core::{Error, RngStream};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() < tol, "{a} vs {b} (tol {tol})");
}

fn random_mdp(states: usize, actions: usize, seed: u64) -> TabularMdp<f64> {
    let mut rng = RngStream::new(seed, 0);
    let mut p = vec![0.0; states * actions * states];
    for row in p.chunks_mut(states) {
        sample_dirichlet_row(row, &mut rng);
    }
    TabularMdp::with_goal(states, actions, p, 0, 1.0, 0.9).unwrap()
}

#[test]
fn geometric_series() {
    let m = TabularMdp::new(1, 1, vec![1.0], vec![1.0], 0.9).unwrap();
    close(value_iteration(&m, 1e-10).unwrap()[0], 10.0, 1e-9);
}

#[test]
fn deterministic_two_state_chain() {
    // action 0 stays, action 1 switches; entering state 1 pays 1
    let p = vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let m = TabularMdp::with_goal(2, 2, p, 1, 1.0, 0.9).unwrap();
    let q = value_iteration(&m, 1e-12).unwrap();
    // V(1) = 1/(1−γ) = 10, V(0) = 1 + γV(1) = 10
    // Q(0,0) = γV(0), Q(0,1) = 1 + γV(1), Q(1,0) = 1 + γV(1), Q(1,1) = γV(0)
    for (got, want) in q.iter().zip([9.0, 10.0, 10.0, 9.0]) {
        close(*got, want, 1e-9);
    }
    assert_eq!(greedy_policy(&m, &q), vec![1, 0]);
}

#[test]
fn non_stochastic_rows_are_rejected() {
    assert!(matches!(TabularMdp::new(1, 1, vec![0.9f64], vec![0.0], 0.9), Err(Error::Argument(_))));
    assert!(TabularMdp::new(2, 1, vec![1.2f64, -0.2, 0.0, 1.0], vec![0.0; 4], 0.9).is_err());
}

#[test]
fn cesaro_limits_of_simple_chains() {
    let cycle = cesaro_limit(&[0.0, 1.0, 1.0, 0.0], &[1.0, 0.0]);
    close(cycle[0], 0.5, 1e-12);
    let identity = cesaro_limit(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], &[1.0 / 3.0; 3]);
    for x in identity {
        close(x, 1.0 / 3.0, 1e-12);
    }
}

#[test]
fn cesaro_limit_is_the_left_eigenvector() {
    let n = 10;
    let mut rng = RngStream::new(3, 3);
    let mut chain = vec![0.0f64; n * n];
    for row in chain.chunks_mut(n) {
        sample_dirichlet_row(row, &mut rng);
        // mix with uniform so the chain is irreducible
        row.iter_mut().for_each(|x| *x = 0.9 * *x + 0.01);
    }
    let got = cesaro_limit(&chain, &vec![1.0 / n as f64; n]);
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        pi = (0..n).map(|j| (0..n).map(|i| pi[i] * chain[i * n + j]).sum()).collect();
    }
    for (a, b) in got.iter().zip(&pi) {
        close(*a, *b, 1e-8);
    }
    close(got.iter().sum::<f64>(), 1.0, 1e-10);
}

#[test]
fn scaling_is_a_ratio() {
    let m = random_mdp(10, 3, 4);
    let mass = goal_stationary_mass(&m, 0, 1.0).unwrap();
    let r = scale_goal_reward(&m, 0).unwrap();
    close(r * mass, 0.5, 1e-12);
    // doubling the unit reward leaves the greedy policy, hence the mass, unchanged
    close(goal_stationary_mass(&m, 0, 2.0).unwrap() * r, 0.5, 1e-12);
}

#[test]
fn unreachable_goal_is_degenerate() {
    // state 1 is absorbing and state 0 can never be entered
    let p = vec![0.0, 1.0, 0.0, 1.0];
    let m = TabularMdp::with_goal(2, 1, p, 0, 1.0, 0.9).unwrap();
    assert!(matches!(scale_goal_reward(&m, 0), Err(Error::DegenerateMdp { .. })));
}

#[test]
fn scaled_greedy_policy_earns_half() {
    let m = random_mdp(10, 3, 5);
    let r = scale_goal_reward(&m, 0).unwrap();
    let q = value_iteration(&m, SCALING_VI_TOL).unwrap();
    let d = greedy_stationary_distribution(&m, &q);
    close(r * d[0], 0.5, 1e-12);
}

#[test]
fn value_iteration_contracts() {
    let m = random_mdp(10, 3, 6);
    let (_, gaps) = value_iteration_logged(&m, 1e-10).unwrap();
    for w in gaps.windows(2) {
        assert!(w[1] <= m.gamma * w[0] + 1e-13, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn belief_planner_claims() {
    let fast = belief_value_iteration(0.8, 0.999, 0.9, 2001).unwrap();
    for i in reachable_beliefs(&fast, 0.5, 0.999) {
        assert_eq!(fast.choice[i], CoinChoice::Known, "belief {}", fast.grid[i]);
    }
    let slow = belief_value_iteration(0.8, 0.001, 0.999, 2001).unwrap();
    assert!(slow.choice.contains(&CoinChoice::Swapping));
    for q in [0.0, 0.3, 1.0] {
        let p = belief_value_iteration(1.0, q, 0.95, 201).unwrap();
        assert!(p.choice.iter().all(|&c| c == CoinChoice::Known));
    }
    assert!(belief_value_iteration(0.8, 0.5, 0.9, 1).is_err());
}
