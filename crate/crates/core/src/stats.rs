//! Compensated sums and sample summaries.

use crate::error::{arg, Result};
use crate::scalar::Scalar;

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    comp: F,
}

impl<F: Scalar> CompensatedSum<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), comp: F::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sum + self.comp
    }
}

/// Arithmetic mean of a nonempty reward sequence.
pub fn average_reward<F: Scalar>(rewards: &[F]) -> Result<F> {
    if rewards.is_empty() {
        return arg("average_reward needs at least one reward");
    }
    let mut acc = CompensatedSum::new();
    for &r in rewards {
        acc.add(r);
    }
    Ok(acc.value() / F::count(rewards.len()))
}

/// Mean, sample standard deviation and 95% normal-approximation half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
    pub n: usize,
}

pub const Z95: f64 = 1.959_963_984_540_054;

impl SampleStats {
    /// Summarizes `xs`. A single sample has zero spread.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return arg("cannot summarize an empty sample");
        }
        let n = xs.len();
        let mean = average_reward(xs)?;
        let std = if n > 1 {
            let mut acc = CompensatedSum::new();
            for &x in xs {
                acc.add((x - mean) * (x - mean));
            }
            (acc.value() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, std, ci95: Z95 * std / (n as f64).sqrt(), n })
    }

    pub fn stderr(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_alternating_rewards() {
        assert_eq!(average_reward(&[1.0, 0.0, 1.0, 0.0]).unwrap(), 0.5);
        assert_eq!(average_reward(&[0.3f32; 17]).unwrap(), 0.3f32);
        assert!(average_reward::<f64>(&[]).is_err());
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1.0e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn summary_of_known_sample() {
        let s = SampleStats::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.ci95 - Z95 * s.std / 2.0).abs() < 1e-15);
    }
}
