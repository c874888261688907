//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the simulators and the query calculus are written against.
///
/// Implemented for `f32` and `f64`. The associated tolerances scale the
/// membership checks (normalization, subspace constancy) to the precision of
/// the type; the `f64` values are the ones every documented tolerance refers to.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Accepted deviation from unit norm and from per-class constancy.
    const STATE_TOL: f64;
    /// Relative bracket width at which bisection stops.
    const ROOT_REL_TOL: f64;

    /// Converts an `f64` literal. Panics only for values the type cannot hold,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count fits in a float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const STATE_TOL: f64 = 1e-4;
    const ROOT_REL_TOL: f64 = 1e-6;
}

impl Real for f64 {
    const STATE_TOL: f64 = 1e-9;
    const ROOT_REL_TOL: f64 = 1e-15;
}
