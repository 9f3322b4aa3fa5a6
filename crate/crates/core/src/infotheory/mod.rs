//! Closed-form Gaussian information analysis.

pub mod bounds;
pub mod errors;
pub mod gaussian;
pub mod lms_moments;

pub use bounds::{regret_bound_entropy, regret_bound_logit};
pub use errors::{
    default_future_horizon, default_past_horizon, finite_time_error, finite_time_joint, forgetting_error,
    implasticity_error, lag_decomposition, total_error, LagTerm, MAX_HORIZON, MAX_LAG_HORIZON, TRUNCATION,
};
pub use gaussian::{bits_to_nats, chain_mi, gaussian_cond_mi, nats_to_bits, GaussianJointModel};
pub use lms_moments::{
    delta_star, delta_star_sq, delta_star_sq_dalpha, mi_capacity, optimal_alpha, posterior_pred_params, steady_cov,
    Coord, LmsSteadyCovariance,
};
