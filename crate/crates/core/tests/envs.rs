mod common;

use std::sync::Arc;

use common::{assert_mean_near, mean, variance, variance_stderr};
use contilab_core::envs::{ArmProcess, CoinPrior, DriftSchedule, GoalMdpParams};
use contilab_core::mdp::{greedy_policy, scale_goal_reward, value_iteration, TabularMdp, SCALING_VI_TOL};
use contilab_core::{Ar1ScalarEnv, CoinSwapEnv, Environment, GaussianAr1BanditEnv, GoalMdpEnv, RngStream, StreamRole};

#[test]
fn ar1_noiseless_decay() {
    let mut env = Ar1ScalarEnv::new(0.9, 0.0, 0.0, 0.0, 1.0).unwrap().with_initial_theta(1.0);
    let mut rng = RngStream::new(1, 1);
    env.reset(&mut rng);
    let ys: Vec<f64> = (0..3).map(|_| env.ar1_step(&mut rng)).collect();
    for (y, want) in ys.iter().zip([0.9, 0.81, 0.729]) {
        assert!((y - want).abs() < 1e-12);
    }
}

#[test]
fn ar1_frozen_latent_leaves_only_observation_noise() {
    let mut env = Ar1ScalarEnv::new(1.0, 0.0, 0.7, 0.0, 1.0).unwrap();
    let mut rng = RngStream::new(2, 1);
    env.reset(&mut rng);
    let n = 100_000;
    let ys: Vec<f64> = (0..n).map(|_| env.ar1_step(&mut rng)).collect();
    let v = variance(&ys);
    assert!((v - 0.49).abs() < 4.0 * variance_stderr(0.49, n), "{v}");
}

#[test]
fn ar1_stationary_latent_has_unit_variance() {
    let mut env = Ar1ScalarEnv::stationary(0.5, 1.0).unwrap();
    let mut rng = RngStream::new(3, 1);
    env.reset(&mut rng);
    let n = 100_000;
    let thetas: Vec<f64> = (0..n)
        .map(|_| {
            env.ar1_step(&mut rng);
            env.theta()
        })
        .collect();
    // lag-one correlation 0.5 inflates the variance of the variance by (1+η²)/(1−η²)
    let v = variance(&thetas);
    assert!((v - 1.0).abs() < 4.0 * variance_stderr(1.0, n) * (1.25f64 / 0.75).sqrt(), "{v}");
}

#[test]
fn fixed_coins_show_their_bias() {
    let mut env =
        CoinSwapEnv::new(vec![(CoinPrior::Fixed(0.3), 0.0), (CoinPrior::Beta { a: 2.0, b: 2.0 }, 0.0)]).unwrap();
    let mut rng = RngStream::new(4, 1);
    env.reset(&mut rng);
    let p = env.biases();
    for (arm, &bias) in p.iter().enumerate() {
        let xs: Vec<f64> = (0..100_000).map(|_| f64::from(u8::from(env.coin_step(arm, &mut rng).unwrap()))).collect();
        assert_mean_near(&xs, bias, 4.0, "head rate");
        assert_eq!(env.biases()[arm], bias);
    }
    assert!(env.coin_step(2, &mut rng).is_err());
}

#[test]
fn fast_swapping_dyadic_coin_is_fair() {
    let mut env = CoinSwapEnv::new(vec![(CoinPrior::dyadic(), 0.999)]).unwrap();
    let mut rng = RngStream::new(5, 1);
    env.reset(&mut rng);
    let xs: Vec<f64> = (0..100_000).map(|_| f64::from(u8::from(env.coin_step(0, &mut rng).unwrap()))).collect();
    assert_mean_near(&xs, 0.5, 4.0, "head rate");
}

#[test]
fn full_replacement_removes_autocorrelation() {
    let mut env = CoinSwapEnv::new(vec![(CoinPrior::dyadic(), 1.0)]).unwrap();
    let mut rng = RngStream::new(6, 1);
    env.reset(&mut rng);
    let xs: Vec<f64> = (0..100_001).map(|_| f64::from(u8::from(env.coin_step(0, &mut rng).unwrap()))).collect();
    let m = mean(&xs);
    let products: Vec<f64> = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).collect();
    assert_mean_near(&products, 0.0, 4.0, "lag-one autocovariance");
}

#[test]
fn frozen_bandit_pays_latent_mean() {
    let arms = vec![ArmProcess { eta: 1.0, zeta: 0.0, mu0: 0.0, sigma0: 1.0 }; 2];
    let mut env = GaussianAr1BanditEnv::new(arms, 1.0).unwrap();
    let mut rng = RngStream::new(7, 1);
    env.reset(&mut rng);
    let theta = env.theta().to_vec();
    let xs: Vec<f64> = (0..100_000).map(|_| env.bandit_step(1, &mut rng).unwrap()).collect();
    assert_mean_near(&xs, theta[1], 4.0, "frozen arm");
}

#[test]
fn memoryless_bandit_rewards_are_iid() {
    let arms = vec![ArmProcess { eta: 0.0, zeta: 1.0, mu0: 0.0, sigma0: 1.0 }];
    let mut env = GaussianAr1BanditEnv::new(arms, 0.5).unwrap();
    let mut rng = RngStream::new(8, 1);
    env.reset(&mut rng);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| env.bandit_step(0, &mut rng).unwrap()).collect();
    let v = variance(&xs);
    assert!((v - 1.25).abs() < 4.0 * variance_stderr(1.25, n), "{v}");
}

#[test]
fn bandit_latent_autocovariance_is_geometric() {
    let eta = 0.8f64;
    let mut env = GaussianAr1BanditEnv::stationary(1, eta, 1.0).unwrap();
    let mut rng = RngStream::new(9, 1);
    env.reset(&mut rng);
    let thetas: Vec<f64> = (0..200_000)
        .map(|_| {
            let th = env.theta()[0];
            env.bandit_step(0, &mut rng).unwrap();
            th
        })
        .collect();
    for k in 1..4 {
        let products: Vec<f64> = thetas.iter().zip(&thetas[k..]).map(|(a, b)| a * b).collect();
        // neighbouring products are correlated; sixfold the iid tolerance
        assert_mean_near(&products, eta.powi(k as i32), 6.0, "latent autocovariance");
    }
}

#[test]
fn unobserved_arms_evolve_the_same() {
    let run = |arm: usize| {
        let mut env = GaussianAr1BanditEnv::stationary(3, 0.9, 1.0).unwrap();
        let mut rng = RngStream::new(10, 1);
        env.reset(&mut rng);
        (0..100)
            .map(|_| {
                env.bandit_step(arm, &mut rng).unwrap();
                env.theta()[2]
            })
            .collect::<Vec<f64>>()
    };
    assert_eq!(run(0), run(1));
}

#[test]
fn static_goal_mdp_pays_half_per_step_under_the_planned_policy() {
    let params = GoalMdpParams::standard(0.0);
    let mut env = GoalMdpEnv::new(params).unwrap();
    let mut rng = RngStream::new(11, 1);
    env.reset(&mut rng);
    let mdp = TabularMdp::with_goal(10, 3, env.transitions().to_vec(), 0, 1.0, 0.9).unwrap();
    let q = value_iteration(&mdp, SCALING_VI_TOL).unwrap();
    let policy = greedy_policy(&mdp, &q);
    assert!((env.goal_reward() - scale_goal_reward(&mdp, 0).unwrap()).abs() < 1e-12);
    let n = 1_000_000;
    let mut total = 0.0;
    for _ in 0..n {
        let (_, r) = env.mdp_step(policy[env.state()], &mut rng).unwrap();
        total += r;
    }
    let avg = total / n as f64;
    assert!((avg - 0.5).abs() < 0.02, "{avg}");
}

#[test]
fn resample_rate_matches_binomial_mean() {
    let mut env = GoalMdpEnv::new(GoalMdpParams::standard(1e-3)).unwrap();
    let mut rng = RngStream::new(12, 1);
    env.reset(&mut rng);
    let xs: Vec<f64> = (0..100_000)
        .map(|i| {
            env.mdp_step(i % 3, &mut rng).unwrap();
            env.rows_changed_last_step() as f64
        })
        .collect();
    assert_mean_near(&xs, 0.03, 4.0, "rows resampled per step");
}

#[test]
fn rows_stay_stochastic_under_fast_drift() {
    let mut env = GoalMdpEnv::new(GoalMdpParams::standard(0.2)).unwrap();
    let mut rng = RngStream::new(13, 1);
    env.reset(&mut rng);
    for i in 0..2000 {
        env.mdp_step(i % 3, &mut rng).unwrap();
        for row in env.transitions().chunks(10) {
            assert!(row.iter().all(|&p| p >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(env.goal_reward() > 0.0 && env.goal_reward().is_finite());
    }
}

#[test]
fn drift_does_not_depend_on_actions() {
    let trial = RngStream::new(14, 3);
    let env_stream = trial.child(StreamRole::EnvNoise);
    let params = GoalMdpParams::standard(0.01);
    let schedule = Arc::new(DriftSchedule::generate(params, 2000, &env_stream).unwrap());
    for policy in [0usize, 1, 2] {
        let mut env = GoalMdpEnv::new(params).unwrap();
        let mut rng = env_stream.clone();
        env.reset(&mut rng);
        let mut events = schedule.events.iter().peekable();
        for t in 0..2000u64 {
            env.mdp_step(policy, &mut rng).unwrap();
            if let Some(ev) = events.next_if(|ev| ev.step == t) {
                assert_eq!(env.goal_reward(), ev.goal_reward);
                for (r, row) in &ev.rows {
                    assert_eq!(&env.transitions()[r * 10..(r + 1) * 10], &row[..]);
                }
            }
        }
    }
}

#[test]
fn dirichlet_rows_are_normalized_in_single_precision() {
    let mut rng = RngStream::new(15, 1);
    let mut row = vec![0.0f32; 10];
    for _ in 0..100 {
        contilab_core::envs::sample_dirichlet_row(&mut row, &mut rng);
        assert!((row.iter().sum::<f32>() - 1.0).abs() < 1e-5);
    }
}
