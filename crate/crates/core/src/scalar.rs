//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::FromPrimitive;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Numerical tolerances tied to a scalar precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub recon: f64,
    pub pti: f64,
}

impl Tolerances {
    pub const F64: Tolerances = Tolerances {
        herm: 1e-9,
        trace: 1e-9,
        psd: 1e-8,
        recon: 1e-10,
        pti: 1e-9,
    };

    pub const F32: Tolerances = Tolerances {
        herm: 1e-4,
        trace: 1e-4,
        psd: 1e-4,
        recon: 1e-4,
        pti: 1e-4,
    };
}

/// Real scalar usable as the entry type of states, tensors and samplers.
pub trait Real: RealField + Copy + FromPrimitive + Display + Debug + Send + Sync + 'static {
    const TOL: Tolerances;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Draws a standard normal variate.
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Real for f64 {
    const TOL: Tolerances = Tolerances::F64;

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }

    #[inline]
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f32 {
    const TOL: Tolerances = Tolerances::F32;

    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }

    #[inline]
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

pub type C<T> = num_complex::Complex<T>;
pub type CMatrix<T> = nalgebra::DMatrix<C<T>>;
pub type RMatrix<T> = nalgebra::DMatrix<T>;
pub type CVector<T> = nalgebra::DVector<C<T>>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}
