//! Scalar abstraction the crate is generic over.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar type for points, filtration values and fitting math.
///
/// `f32` and `f64` both qualify. Conversion to `f64` must be exact (true for
/// every IEEE-754 binary32/binary64 value); the geometric predicates rely on
/// that so the exact arithmetic fallback sees the same numbers regardless of
/// the scalar the caller picked.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Default
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into the scalar type (rounding if needed).
    #[inline]
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Widens to `f64` without loss.
    #[inline]
    fn to_f64_exact(self) -> f64 {
        self.to_f64().expect("scalar representable in f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f32_round_trips_exactly_through_f64() {
        let values = [0.0f32, -0.0, 1.5, f32::MIN_POSITIVE, 3.4e38, -7.25e-3];
        for v in values {
            let wide = v.to_f64_exact();
            assert_eq!(wide as f32, v);
        }
    }

    #[test]
    fn cast_is_identity_for_f64() {
        assert_eq!(f64::cast(0.1), 0.1);
        assert_eq!(f64::cast(-3.75), -3.75);
    }
}
