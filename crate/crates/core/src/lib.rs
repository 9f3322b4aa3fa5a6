//! Simulation and analysis toolkit for continual-learning agents in
//! nonstationary environments.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to [`Real`].

// `!(x > 0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod envs;
pub mod error;
pub mod infotheory;
pub mod linalg;
pub mod mdp;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use rng::{RngStream, StreamRole};
pub use scalar::Scalar;
pub use sim::{
    run_trajectory, run_trajectory_with, Agent, Environment, RunOptions, Space, StepRecord, TrajectorySummary,
};
pub use stats::{average_reward, SampleStats};
pub use sweep::{monte_carlo_sweep, CellResult, Metrics, SweepCell, SweepTable};

/// Default scalar width.
pub type Real = f64;

pub type LmsAgent = agents::LmsAgent<Real>;
pub type CapacityLmsAgent = agents::CapacityLmsAgent<Real>;
pub type IdbdAgent = agents::IdbdAgent<Real>;
pub type TsAgent = agents::TsAgent<Real>;
pub type PsAgent = agents::PsAgent<Real>;
pub type OptimisticQAgent = agents::OptimisticQAgent<Real>;
pub type DyadicCoinBeliefAgent = agents::DyadicCoinBeliefAgent<Real>;
pub type LogitPredictorAgent = agents::LogitPredictorAgent<Real>;
pub type BitFlipAgent = agents::BitFlipAgent<Real>;

pub type Ar1ScalarEnv = envs::Ar1ScalarEnv<Real>;
pub type CoinSwapEnv = envs::CoinSwapEnv<Real>;
pub type GaussianAr1BanditEnv = envs::GaussianAr1BanditEnv<Real>;
pub type LogitEnv = envs::LogitEnv<Real>;
pub type BitFlipEnv = envs::BitFlipEnv<Real>;
pub type GoalMdpEnv = envs::GoalMdpEnv<Real>;

pub type TabularMdp = mdp::TabularMdp<Real>;
pub type GaussianJointModel = infotheory::GaussianJointModel<Real>;
