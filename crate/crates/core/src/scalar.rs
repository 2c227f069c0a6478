//! The floating-point abstraction every geometric routine is written against.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Coordinate and distance type: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal. Literals used by this crate are all representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Total order over non-NaN scalars, for ordered containers and sorting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OrdScalar<T>(pub T);

impl<T: Scalar> Eq for OrdScalar<T> {}

impl<T: Scalar> PartialOrd for OrdScalar<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for OrdScalar<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(self.0, other.0)
    }
}

/// Compares two scalars; NaN never reaches here (inputs are validated finite).
#[inline]
pub fn cmp_scalar<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).expect("NaN in ordered comparison")
}

/// `|a - b| <= tol * max(1, |a|, |b|)`, with equal infinities treated as close.
pub fn rel_close<T: Scalar>(a: T, b: T, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= T::lit(tol) * scale
}
