//! Generic floating-point scalar used throughout the crate.
//!
//! All numerical kernels (Pauli algebra, statevectors, eigensolvers,
//! kinematics) are written against [`Scalar`] so they work for both `f32`
//! and `f64`. The crate-root aliases fix `f64` as the production type; the
//! pinned numerical tolerances assume it.

use num_complex::Complex;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` (exact for `f64` itself).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Scalar")
    }

    /// Lossy conversion to `f64`.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    /// A numerical tolerance: `floor` for f64, scaled up with the machine
    /// epsilon for coarser scalars.
    fn tol(floor: f64) -> Self {
        let eps_scaled = Self::epsilon() * Self::of(1e4);
        Self::of(floor).max(eps_scaled)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the crate scalar.
pub type Cplx<S> = Complex<S>;

/// `i` as a complex constant.
pub fn imag_unit<S: Scalar>() -> Cplx<S> {
    Complex::new(S::zero(), S::one())
}

/// Real constant promoted to a complex number.
pub fn cplx<S: Scalar>(re: f64) -> Cplx<S> {
    Complex::new(S::of(re), S::zero())
}
