//! Scalar abstraction for the numeric kernels.
//!
//! Everything downstream of the Green function is written against this trait
//! so the same code runs at `f32` or `f64`; the experiment suite instantiates
//! `f64` throughout (the exact-linear-algebra tolerances require it).

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

/// Real scalar usable in the lattice kernels: dense linear algebra via
/// nalgebra plus the handful of sampling primitives the soups need.
pub trait Scalar:
    nalgebra::RealField + num_traits::NumAssign + Copy + Default + Send + Sync + 'static
{
    fn of_f64(x: f64) -> Self;
    fn as_f64(self) -> f64;

    /// Standard normal draw.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Exponential(1) draw.
    fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Gamma(shape, scale) draw.
    fn gamma<R: Rng + ?Sized>(shape: Self, scale: Self, rng: &mut R) -> Self;
    /// Uniform draw in `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

/// Poisson draw with `f64` mean; `mean = 0` yields 0.
pub fn poisson_u64<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive Poisson mean");
    dist.sample(rng) as u64
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn of_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }
            #[inline]
            fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }
            fn gamma<R: Rng + ?Sized>(shape: Self, scale: Self, rng: &mut R) -> Self {
                Gamma::new(shape, scale).expect("valid Gamma parameters").sample(rng)
            }
            #[inline]
            fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.gen::<$t>()
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
