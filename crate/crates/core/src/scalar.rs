//! Scalar abstraction shared by the linear-algebra core.

use nalgebra::RealField;
use num_complex::Complex;

/// Complex amplitude over a real scalar `T`.
pub type Cx<T> = Complex<T>;

/// Real scalar the simulator core is generic over.
///
/// Implemented for `f32` and `f64`; `f64` is the default everywhere.
pub trait Real: RealField + Copy {
    /// Default tolerance for algebraic identities at this precision.
    fn tol() -> Self;

    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion back to `f64`.
    fn as_f64(self) -> f64 {
        self.to_subset_unchecked()
    }
}

impl Real for f64 {
    fn tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn tol() -> Self {
        1e-4
    }
}

pub(crate) fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

/// Modulus `|z|`.
pub fn modulus<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}
