//! Finite-horizon regret bounds for learning a target from data.

use crate::scalar::Scalar;

/// `H / T`: average regret bound from the entropy of the learning target.
pub fn regret_bound_entropy<F: Scalar>(entropy: F, horizon: u64) -> F {
    entropy / F::lit(horizon as f64)
}

/// `(ln(1 + 2T) + 1) / (2T)`: the rate-distortion bound for a logit target
/// with a standard normal parameter, optimized over the distortion level.
pub fn regret_bound_logit<F: Scalar>(horizon: u64) -> F {
    let t = F::lit(horizon as f64);
    let two = F::lit(2.0);
    ((two * t).ln_1p() + F::one()) / (two * t)
}
