//! Floating point abstraction shared by every numeric routine in the crate.
//!
//! All models, posteriors, policies and bound calculators are generic over
//! [`Scalar`]; `f64` is the working precision used by the simulator front end
//! and `f32` is supported for memory-bound sweeps.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Poisson, StandardNormal};

/// Real scalar with the sampling primitives the samplers need.
///
/// The sampling hooks exist so generic code does not have to repeat the
/// `rand_distr` trait bounds for every distribution it draws from.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Uniform draw on `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma draw with the given shape and unit scale.
    fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    fn sample_beta<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self;

    /// Poisson draw returned as a scalar (a nonnegative integer value).
    fn sample_poisson<R: Rng + ?Sized>(rate: Self, rng: &mut R) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }

            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
                Gamma::new(shape, 1.0)
                    .expect("gamma shape validated by caller")
                    .sample(rng)
            }

            fn sample_beta<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self {
                Beta::new(a, b)
                    .expect("beta parameters validated by caller")
                    .sample(rng)
            }

            fn sample_poisson<R: Rng + ?Sized>(rate: Self, rng: &mut R) -> Self {
                Poisson::new(rate)
                    .expect("poisson rate validated by caller")
                    .sample(rng)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Absolute tolerance used when comparing real parameters for equality.
pub fn param_tolerance<S: Scalar>() -> S {
    S::lit(1e-12)
}

/// Index of the largest finite value, lowest index on ties. `None` when empty.
pub fn argmax<S: Scalar>(values: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0_f64, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax(&[f64::NAN, 0.5]), Some(1));
        assert_eq!(argmax::<f32>(&[]), None);
    }

    #[test]
    fn f32_and_f64_share_literals() {
        assert_eq!(<f32 as Scalar>::lit(0.5), 0.5_f32);
        assert_eq!(<f64 as Scalar>::from_count(7), 7.0);
    }
}
