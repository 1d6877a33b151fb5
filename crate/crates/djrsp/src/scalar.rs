//! Real scalar abstraction backing all complex arithmetic in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the simulator is generic over: `f64` or `f32`.
///
/// The associated tolerances scale the structural checks with the
/// precision of the type; every published tolerance in the test suites
/// refers to the `f64` values.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Elementwise tolerance for structural checks (hermiticity, norm).
    fn structural_tol() -> Self;

    /// Lowest admissible eigenvalue of a positive-semidefinite operator.
    fn psd_floor() -> Self;

    /// Post-selection probabilities below this cutoff mark a branch as
    /// impossible rather than being renormalized into nonsense.
    fn zero_probability_cutoff() -> Self;
}

impl Scalar for f64 {
    fn structural_tol() -> Self {
        1e-12
    }
    fn psd_floor() -> Self {
        -1e-10
    }
    fn zero_probability_cutoff() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn structural_tol() -> Self {
        1e-5
    }
    fn psd_floor() -> Self {
        -1e-4
    }
    fn zero_probability_cutoff() -> Self {
        1e-9
    }
}

/// Lifts a small integer constant into the scalar type.
pub(crate) fn real<S: Scalar>(x: i32) -> S {
    S::from_i32(x).expect("small integer constant fits any float")
}
