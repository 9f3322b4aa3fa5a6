//! Environment families.

pub mod ar1;
pub mod bandit;
pub mod bitflip;
pub mod coin;
pub mod goal_mdp;
pub mod logit;

pub use ar1::Ar1ScalarEnv;
pub use bandit::{ArmProcess, GaussianAr1BanditEnv};
pub use bitflip::BitFlipEnv;
pub use coin::{CoinPrior, CoinSwapEnv};
pub use goal_mdp::{sample_dirichlet_row, DriftEvent, DriftSchedule, GoalMdpEnv, GoalMdpParams};
pub use logit::{sigmoid, LogitEnv};
