mod common;

use common::{assert_mean_near, normal_cdf, variance, variance_stderr};
use contilab_core::agents::{
    uniform_argmax, ArmPosterior, CapacityLmsAgent, IdbdMode, LmsAgent, ShrinkageMode, DEFAULT_GRID_POINTS,
};
use contilab_core::envs::CoinPrior;
use contilab_core::infotheory::{delta_star, optimal_alpha};
use contilab_core::{
    run_trajectory, Agent, Ar1ScalarEnv, BitFlipAgent, BitFlipEnv, CoinSwapEnv, DyadicCoinBeliefAgent, Environment,
    IdbdAgent, LogitEnv, LogitPredictorAgent, OptimisticQAgent, PsAgent, RngStream, Scalar, TsAgent,
};

fn frequencies(n: usize, arms: usize, mut pick: impl FnMut() -> usize) -> Vec<f64> {
    let mut counts = vec![0usize; arms];
    for _ in 0..n {
        counts[pick()] += 1;
    }
    counts.into_iter().map(|c| c as f64 / n as f64).collect()
}

fn binomial_tol(p: f64, n: usize) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn zero_variance_thompson_is_greedy() {
    let mut post = ArmPosterior::new(3, 1.0, 0.0, 1.0, 0.0, 1.0).unwrap();
    post.mu = vec![0.2, 0.9, -1.0];
    post.var = vec![0.0; 3];
    let ts = TsAgent::new(post);
    let mut rng = RngStream::new(1, 1);
    for _ in 0..100 {
        assert_eq!(ts.ts_act(&mut rng), 1);
    }
}

#[test]
fn symmetric_arms_are_pulled_equally() {
    let ts = TsAgent::new(ArmPosterior::new(2, 1.0, 0.0, 1.0, 0.3, 0.5).unwrap());
    let mut rng = RngStream::new(2, 1);
    let n = 100_000;
    let f = frequencies(n, 2, || ts.ts_act(&mut rng));
    assert!((f[0] - 0.5).abs() < binomial_tol(0.5, n), "{f:?}");
}

#[test]
fn thompson_choice_probability_matches_gaussian_difference() {
    let mut post = ArmPosterior::new(2, 1.0, 0.0, 1.0, 0.0, 1.0).unwrap();
    post.mu = vec![1.0, 0.0];
    post.var = vec![0.01, 0.01];
    let ts = TsAgent::new(post);
    let mut rng = RngStream::new(3, 1);
    let n = 100_000;
    let want = normal_cdf(1.0 / 0.02f64.sqrt());
    let f = frequencies(n, 2, || ts.ts_act(&mut rng));
    assert!((f[0] - want).abs() < binomial_tol(want, n) + 1e-6, "{} vs {want}", f[0]);
}

#[test]
fn posterior_variances_follow_the_deterministic_recursion() {
    let (eta, zeta, sigma) = (0.9f64, 0.19f64.sqrt(), 1.0);
    let mut a = ArmPosterior::new(2, eta, zeta, sigma, 0.0, 1.0).unwrap();
    let mut b = a.clone();
    let mut var = [1.0f64, 1.0];
    let mut rng = RngStream::new(4, 1);
    for t in 0..200 {
        let arm = t % 3 % 2;
        a.ts_update(arm, f64::standard_normal(&mut rng) * 10.0).unwrap();
        b.ts_update(arm, -5.0).unwrap();
        for (k, v) in var.iter_mut().enumerate() {
            let pred = eta * eta * *v + zeta * zeta;
            *v = if k == arm { 1.0 / (1.0 / pred + 1.0 / (sigma * sigma)) } else { pred };
        }
        assert_eq!(a.var, b.var);
        for (got, want) in a.var.iter().zip(&var) {
            assert!((got - want).abs() < 1e-14 && *got > 0.0);
        }
    }
}

#[test]
fn conjugate_averaging_when_stationary() {
    let mut p = ArmPosterior::new(2, 1.0f64, 0.0, 1.0, 0.4, 1.0).unwrap();
    p.ts_update(0, 2.0).unwrap();
    assert!((p.var[0] - 0.5).abs() < 1e-15 && (p.mu[0] - 1.2).abs() < 1e-15);
    assert_eq!((p.mu[1], p.var[1]), (0.4, 1.0));
}

#[test]
fn durable_predictive_sampling_is_thompson_sampling() {
    let post = ArmPosterior::new(3, 1.0, 0.0, 1.0, 0.0, 1.0).unwrap();
    let mut ts = TsAgent::new(post.clone());
    let mut ps = PsAgent::new(post);
    assert_eq!(ps.x_star, 0.0);
    let (mut r1, mut r2) = (RngStream::new(5, 1), RngStream::new(5, 1));
    for t in 0..1000 {
        let (a, b) = (ts.act(&mut r1), ps.act(&mut r2));
        assert_eq!(a, b);
        let reward = (t as f64 * 0.77).sin();
        ts.update(&a, &reward, reward, &mut r1).unwrap();
        ps.update(&b, &reward, reward, &mut r2).unwrap();
    }
}

#[test]
fn memoryless_predictive_sampling_is_greedy() {
    let mut post = ArmPosterior::stationary(3, 0.0, 1.0).unwrap();
    post.mu = vec![0.1, -0.3, 0.5];
    let ps = PsAgent::new(post);
    assert!(ps.sampling_variances().iter().all(|&v| v == 0.0));
    let mut rng = RngStream::new(6, 1);
    for _ in 0..100 {
        assert_eq!(ps.ps_act(&mut rng), 2);
    }
}

#[test]
fn predictive_sampling_variance_is_between_zero_and_posterior() {
    for i in 0..=20 {
        let eta = i as f64 / 20.0;
        let mut post = ArmPosterior::stationary(2, eta, 1.0).unwrap();
        post.var = vec![0.3, 2.0];
        let ps = PsAgent::new(post);
        for (v, s) in ps.sampling_variances().iter().zip(&ps.posterior().var) {
            assert!(*v >= 0.0 && v <= s);
        }
    }
}

#[test]
fn optimistic_q_ties_are_uniform_and_shift_invariant() {
    let mut a = OptimisticQAgent::new(2, 3, 0.2, 0.9, 0.0).unwrap();
    let mut rng = RngStream::new(7, 1);
    let n = 90_000;
    let f = frequencies(n, 3, || a.optq_act(0, &mut rng));
    for x in f {
        assert!((x - 1.0 / 3.0).abs() < binomial_tol(1.0 / 3.0, n));
    }
    a.q = vec![0.3, 0.1, 0.3, 0.0, 0.0, 0.0];
    let mut shifted = a.clone();
    shifted.q.iter_mut().for_each(|x| *x += 17.0);
    let (mut r1, mut r2) = (RngStream::new(8, 1), RngStream::new(8, 1));
    for _ in 0..1000 {
        let act = a.optq_act(0, &mut r1);
        assert_ne!(act, 1);
        assert_eq!(act, shifted.optq_act(0, &mut r2));
    }
    a.q[2] = 0.31;
    assert!((0..100).all(|_| a.optq_act(0, &mut r1) == 2));
}

#[test]
fn coin_belief_stays_in_the_unit_interval() {
    let mut env = CoinSwapEnv::new(vec![(CoinPrior::Fixed(0.8), 0.0), (CoinPrior::dyadic(), 0.05)]).unwrap();
    let mut agent = DyadicCoinBeliefAgent::new(0.8, 0.05).unwrap();
    let mut rng = RngStream::new(9, 1);
    env.reset(&mut rng);
    for t in 0..5000 {
        let arm = if t % 7 == 0 { 1 } else { agent.act(&mut rng) };
        let (heads, r) = env.step(&arm, &mut rng).unwrap();
        agent.update(&arm, &heads, r, &mut rng).unwrap();
        assert!((0.0..=1.0).contains(&agent.b));
    }
}

#[test]
fn logit_predictor_concentrates_on_the_true_parameter() {
    let mut env = LogitEnv::with_theta(2.0);
    let mut agent = LogitPredictorAgent::new(DEFAULT_GRID_POINTS).unwrap();
    let mut rng = RngStream::new(10, 1);
    for _ in 0..10_000 {
        agent.observe(env.emit(&mut rng));
    }
    let want = 2f64.exp() / (1.0 + 2f64.exp());
    assert!((agent.logit_predict() - want).abs() < 0.01, "{}", agent.logit_predict());
    assert!((agent.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn logit_quadrature_is_converged() {
    let mut rng = RngStream::new(11, 1);
    for _ in 0..20 {
        let mut env = LogitEnv::new();
        env.reset(&mut rng);
        let mut coarse = LogitPredictorAgent::new(DEFAULT_GRID_POINTS).unwrap();
        let mut fine = LogitPredictorAgent::new(1025).unwrap();
        for _ in 0..100 {
            let bit = env.emit(&mut rng);
            coarse.observe(bit);
            fine.observe(bit);
        }
        let gap = (coarse.logit_predict() - fine.logit_predict()).abs();
        assert!(gap < 1e-8, "{gap}");
    }
}

#[test]
fn one_bit_agent_earns_the_mean_flip_probability() {
    let mut rewards = Vec::new();
    let root = RngStream::new(12, 0);
    for ep in 0..1000 {
        let mut env = BitFlipEnv::new(CoinPrior::Beta { a: 2.0, b: 1.0 }).unwrap();
        let mut agent = BitFlipAgent::new(2.0 / 3.0).unwrap();
        rewards.push(run_trajectory(&mut env, &mut agent, 1000, &root.fork(ep)).unwrap().average_reward);
    }
    assert_mean_near(&rewards, 2.0 / 3.0, 4.0, "bit-flip accuracy");
}

#[test]
fn capacity_noise_has_the_configured_variance() {
    let mut agent = CapacityLmsAgent::with_delta(0.3, 0.4).unwrap();
    let mut rng = RngStream::new(13, 1);
    let n = 100_000;
    let qs: Vec<f64> = (0..n)
        .map(|_| {
            agent.capacity_lms_update(0.0, &mut rng);
            agent.last_noise()
        })
        .collect();
    let v = variance(&qs);
    assert!((v - 0.16).abs() < 4.0 * variance_stderr(0.16, n), "{v}");
}

#[test]
fn unlimited_capacity_is_plain_lms() {
    let mut noisy = CapacityLmsAgent::with_capacity(0.4, 0.9, 0.5, f64::INFINITY).unwrap();
    assert_eq!(noisy.delta(), 0.0);
    let mut plain = LmsAgent::new(0.4, 0.9, ShrinkageMode::Plain).unwrap();
    let mut env = Ar1ScalarEnv::stationary(0.9, 0.5).unwrap();
    let mut rng = RngStream::new(14, 1);
    env.reset(&mut rng);
    for _ in 0..1000 {
        let y = env.ar1_step(&mut rng);
        assert_eq!(plain.lms_update(y), noisy.capacity_lms_update(y, &mut rng));
    }
}

fn run_idbd(mode: IdbdMode<f64>, seed: u64, steps: u64) -> f64 {
    let mut env = Ar1ScalarEnv::stationary(0.95, 0.5).unwrap();
    let mut agent = IdbdAgent::new(mode, 0.01, 0.1).unwrap();
    run_trajectory(&mut env, &mut agent, steps, &RngStream::new(seed, 0)).unwrap();
    agent.alpha()
}

#[test]
fn capacity_constrained_idbd_finds_the_optimal_stepsize() {
    let target = optimal_alpha(0.95, 0.5).unwrap();
    let alpha = run_idbd(IdbdMode::CapacityConstrained { eta: 0.95, sigma: 0.5, capacity: 0.5 }, 15, 200_000);
    assert!((alpha - target).abs() < 0.05, "{alpha} vs {target}");
}

#[test]
fn fixed_noise_idbd_settles_elsewhere() {
    let target = optimal_alpha(0.95, 0.5).unwrap();
    let delta = delta_star(target, 0.95, 0.5, 0.5).unwrap();
    let alpha = run_idbd(IdbdMode::Standard { delta }, 16, 200_000);
    assert!((alpha - target).abs() > 0.02, "{alpha} vs {target}");
}

#[test]
fn argmax_consumes_one_draw_per_call() {
    let mut a = RngStream::new(17, 1);
    let mut b = RngStream::new(17, 1);
    uniform_argmax(&[1.0, 2.0], &mut a);
    uniform_argmax(&[2.0, 2.0], &mut b);
    assert_eq!(f64::unit_uniform(&mut a), f64::unit_uniform(&mut b));
}
