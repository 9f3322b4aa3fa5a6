//! Floating point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal, StandardUniform};

/// Real scalar used by agents, environments and the information toolkit.
///
/// Implemented for `f32` and `f64`. Sampling primitives live on the trait so
/// generic code does not have to carry `rand_distr` bounds around.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal used in this crate is
    /// representable (possibly rounded) in both supported widths.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    fn count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform draw on `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma(shape, 1) draw. `shape` must be positive.
    fn gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    /// Beta(a, b) draw. Both parameters must be positive.
    fn beta<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self;

    fn normal<R: Rng + ?Sized>(mean: Self, std: Self, rng: &mut R) -> Self {
        mean + std * Self::standard_normal(rng)
    }

    /// Bernoulli draw with success probability `p` (clamped to `[0, 1]`).
    fn bernoulli<R: Rng + ?Sized>(p: Self, rng: &mut R) -> bool {
        Self::unit_uniform(rng) < p
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }

            fn gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
                Gamma::new(shape, 1.0).expect("gamma shape must be positive and finite").sample(rng)
            }

            fn beta<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self {
                Beta::new(a, b).expect("beta parameters must be positive and finite").sample(rng)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
