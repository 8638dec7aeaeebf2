//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable by the probability and projection code.
///
/// Implemented for `f32` and `f64`. Tolerances scale with the machine epsilon
/// so the same algorithms run at either precision.
pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance on the total mass of a pmf.
    fn sum_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Cells below this mass count as structural zeros.
    fn zero_threshold() -> Self {
        Self::lit(1e-15).max(Self::min_positive_value())
    }

    /// Default stopping tolerance for iterative scaling.
    fn default_projection_tol() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(128.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
