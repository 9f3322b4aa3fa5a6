//! Agents for every environment family.

pub mod bitflip;
pub mod coin_belief;
pub mod idbd;
pub mod lms;
pub mod logit;
pub mod optq;
pub mod sampling;

pub use bitflip::BitFlipAgent;
pub use coin_belief::DyadicCoinBeliefAgent;
pub use idbd::{IdbdAgent, IdbdMode, LOG_STEP_MAX, LOG_STEP_MIN};
pub use lms::{CapacityLmsAgent, LmsAgent, ShrinkageMode};
pub use logit::{LogitPredictorAgent, DEFAULT_GRID_POINTS, GRID_HALF_WIDTH};
pub use optq::OptimisticQAgent;
pub use sampling::{ps_sampling_variance, ps_x_star, ArmPosterior, PsAgent, TsAgent};

use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Index drawn uniformly from the maximizers of `values`.
///
/// One uniform draw is consumed per call, tie or not, so the number of draws
/// never depends on the data.
pub fn uniform_argmax<F: Scalar>(values: &[F], rng: &mut RngStream) -> usize {
    let best = values.iter().copied().fold(F::neg_infinity(), F::max);
    let ties = values.iter().filter(|&&v| v == best).count().max(1);
    let u: f64 = f64::unit_uniform(rng);
    let pick = ((u * ties as f64) as usize).min(ties - 1);
    values.iter().enumerate().filter(|(_, &v)| v == best).nth(pick).map_or(0, |(i, _)| i)
}

/// Whether `index` is one of the maximizers of `values`.
pub fn is_argmax<F: Scalar>(values: &[F], index: usize) -> bool {
    let best = values.iter().copied().fold(F::neg_infinity(), F::max);
    values.get(index).is_some_and(|&v| v == best)
}
