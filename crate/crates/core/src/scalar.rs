//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar the solvers are generic over (`f32` or `f64`).
///
/// Tolerances are stored as `f64` and narrowed through [`Real::lit`]; values
/// below the type's resolution are clamped by the callers that care.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + PivotScalar<Modulus = Self>
    + 'static
{
    /// Converts an `f64` literal or tolerance into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts an index or count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field element that can serve as an LU pivot (real or complex).
pub trait PivotScalar: Copy + NumAssign + Debug + Send + Sync {
    type Modulus: Real;
    fn modulus(self) -> Self::Modulus;
}

impl PivotScalar for f32 {
    type Modulus = f32;
    fn modulus(self) -> f32 {
        self.abs()
    }
}

impl PivotScalar for f64 {
    type Modulus = f64;
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl<T: Real> PivotScalar for Complex<T> {
    type Modulus = T;
    fn modulus(self) -> T {
        self.norm()
    }
}
