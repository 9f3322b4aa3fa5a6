use crate::error::{arg, Result};
use crate::rng::RngStream;
use crate::scalar::Scalar;
use crate::sim::{Environment, Space};

/// Prior over a coin's bias.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoinPrior<F> {
    Beta {
        a: F,
        b: F,
    },
    /// Bias `high` with probability `p_high`, otherwise `low`.
    TwoPoint {
        low: F,
        high: F,
        p_high: F,
    },
    Fixed(F),
}

impl<F: Scalar> CoinPrior<F> {
    /// Bias 0 or 1 with equal probability.
    pub fn dyadic() -> Self {
        CoinPrior::TwoPoint { low: F::zero(), high: F::one(), p_high: F::lit(0.5) }
    }

    pub fn sample(&self, rng: &mut RngStream) -> F {
        match *self {
            CoinPrior::Beta { a, b } => F::beta(a, b, rng),
            CoinPrior::TwoPoint { low, high, p_high } => {
                if F::bernoulli(p_high, rng) {
                    high
                } else {
                    low
                }
            }
            CoinPrior::Fixed(p) => p,
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |p: F| p >= F::zero() && p <= F::one();
        let ok = match *self {
            CoinPrior::Beta { a, b } => a > F::zero() && b > F::zero(),
            CoinPrior::TwoPoint { low, high, p_high } => unit(low) && unit(high) && unit(p_high),
            CoinPrior::Fixed(p) => unit(p),
        };
        if ok {
            Ok(())
        } else {
            arg(format!("invalid coin prior {self:?}"))
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoinArm<F> {
    pub prior: CoinPrior<F>,
    pub swap_prob: F,
    bias: F,
}

/// Coins whose biases are independently replaced by fresh prior draws.
///
/// Replacement happens at the start of every step, before the toss.
#[derive(Clone, Debug)]
pub struct CoinSwapEnv<F> {
    arms: Vec<CoinArm<F>>,
}

impl<F: Scalar> CoinSwapEnv<F> {
    pub fn new(arms: Vec<(CoinPrior<F>, F)>) -> Result<Self> {
        if arms.is_empty() {
            return arg("need at least one coin");
        }
        let mut out = Vec::with_capacity(arms.len());
        for (prior, q) in arms {
            prior.validate()?;
            if !(q >= F::zero() && q <= F::one()) {
                return arg(format!("swap probability must lie in [0, 1], got {q}"));
            }
            out.push(CoinArm { prior, swap_prob: q, bias: F::zero() });
        }
        Ok(Self { arms: out })
    }

    pub fn biases(&self) -> Vec<F> {
        self.arms.iter().map(|a| a.bias).collect()
    }

    pub fn coin_step(&mut self, arm: usize, rng: &mut RngStream) -> Result<bool> {
        if arm >= self.arms.len() {
            return arg(format!("coin {arm} does not exist ({} coins)", self.arms.len()));
        }
        for c in &mut self.arms {
            if F::bernoulli(c.swap_prob, rng) {
                c.bias = c.prior.sample(rng);
            }
        }
        Ok(F::bernoulli(self.arms[arm].bias, rng))
    }
}

impl<F: Scalar> Environment<F> for CoinSwapEnv<F> {
    type Action = usize;
    type Observation = bool;

    fn action_space(&self) -> Space {
        Space::Discrete(self.arms.len())
    }

    fn observation_space(&self) -> Space {
        Space::Binary
    }

    fn reset(&mut self, rng: &mut RngStream) -> Option<bool> {
        for c in &mut self.arms {
            c.bias = c.prior.sample(rng);
        }
        None
    }

    fn step(&mut self, arm: &usize, rng: &mut RngStream) -> Result<(bool, F)> {
        let heads = self.coin_step(*arm, rng)?;
        Ok((heads, if heads { F::one() } else { F::zero() }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_coins_never_change() {
        let mut env = CoinSwapEnv::new(vec![(CoinPrior::Fixed(0.3f64), 0.0), (CoinPrior::dyadic(), 0.0)]).unwrap();
        let mut rng = RngStream::new(1, 1);
        env.reset(&mut rng);
        let before = env.biases();
        for _ in 0..1000 {
            env.coin_step(1, &mut rng).unwrap();
        }
        assert_eq!(before, env.biases());
        assert!(env.coin_step(2, &mut rng).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoinSwapEnv::new(vec![(CoinPrior::Fixed(1.5f64), 0.0)]).is_err());
        assert!(CoinSwapEnv::new(vec![(CoinPrior::Fixed(0.5f64), 1.5)]).is_err());
        assert!(CoinSwapEnv::<f64>::new(vec![]).is_err());
    }
}
