//! Scalar abstraction shared by the dense kernels.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the matrix kernels are generic over.
///
/// Implemented for `f32` and `f64`. The acceptance tolerances of the
/// commutant solver are only meaningful for `f64`; `f32` is useful for
/// quick exploratory runs and for checking that algorithms do not depend
/// on a particular precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Relative tolerance used by default when checking Hermiticity and unitarity.
    fn default_tol() -> Self;

    /// Lossy conversion from `f64`; constants in this crate are all representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-4
    }
}

/// Complex scalar over a [`Real`].
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `e^{iθ}` for an angle in radians.
#[inline]
pub fn phase<T: Real>(theta: f64) -> Cx<T> {
    cx(theta.cos(), theta.sin())
}

/// Neumaier-compensated running sum of complex values.
///
/// Used wherever many terms are reduced so that the result does not depend
/// on how the terms were partitioned across threads beyond rounding of the
/// final compensation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T: Real> {
    sum: Cx<T>,
    comp: Cx<T>,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: Cx::new(T::zero(), T::zero()), comp: Cx::new(T::zero(), T::zero()) }
    }

    #[inline]
    pub fn add(&mut self, v: Cx<T>) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.comp.im);
    }

    #[inline]
    pub fn value(&self) -> Cx<T> {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier<T: Real>(sum: T, v: T, comp: &mut T) -> T {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp = *comp + ((sum - t) + v);
    } else {
        *comp = *comp + ((v - t) + sum);
    }
    t
}
