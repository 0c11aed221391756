//! Floating-point abstraction shared by the density, special-function and
//! sampling code.
//!
//! Every numeric routine that does not need dense linear algebra is written
//! against [`Scalar`], so the same code runs in `f32` and `f64`. The trait also
//! carries the handful of random variates the exact samplers need, because
//! `rand_distr` expresses those bounds on the distribution types rather than on
//! the float type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, Poisson, StandardNormal};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold as
    /// a float at all, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform on the open interval (0, 1).
    fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma variate with the given shape and unit scale. `shape` must be positive.
    fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    /// Poisson count returned as a float. A mean of zero returns zero.
    fn sample_poisson<R: Rng + ?Sized>(mean: Self, rng: &mut R) -> Self;
}

// rand_distr rejects means above this; beyond it the normal limit is exact to
// far below the float resolution of the count.
const POISSON_NORMAL_CUTOFF: f64 = 1e15;

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            #[inline]
            fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
                Gamma::new(shape, 1.0)
                    .expect("gamma shape must be positive and finite")
                    .sample(rng)
            }

            #[inline]
            fn sample_poisson<R: Rng + ?Sized>(mean: Self, rng: &mut R) -> Self {
                if mean <= 0.0 {
                    return 0.0;
                }
                if (mean as f64) > POISSON_NORMAL_CUTOFF {
                    let z: Self = StandardNormal.sample(rng);
                    return (mean + mean.sqrt() * z).round().max(0.0);
                }
                Poisson::new(mean)
                    .expect("poisson mean must be finite")
                    .sample(rng)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
