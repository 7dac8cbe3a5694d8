//! The scalar abstraction all numerical routines are generic over.
//!
//! Everything in this crate is written against [`Scalar`] so that the same
//! kernels run in `f64` (the default), `f32`, and the operation-counting
//! wrapper used by the benchmark harness. The trait adds exactly what the
//! kernels need on top of [`num_traits::Float`]: a fused multiply-accumulate
//! *accounting unit* and lossy `f64` conversions for tolerances and
//! diagnostics.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar usable by every routine in this crate.
pub trait Scalar: Float + Debug + Display + Send + Sync + 'static {
    /// Multiply-accumulate: returns `self + x * y`.
    ///
    /// This is the workhorse of every O(np) kernel. It is defined as the
    /// *unfused* product-then-add so that all scalar types (including the
    /// counting wrapper) produce bitwise-identical results; instrumented
    /// types tally it as a single operation.
    fn mac(self, x: Self, y: Self) -> Self;

    /// Converts from `f64`, rounding if the target is narrower.
    fn from_f64_lossy(v: f64) -> Self;

    /// Converts to `f64`, rounding if the source is wider (it never is here).
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Rescales a tolerance calibrated for `f64` to this type's precision.
    ///
    /// The crate's documented tolerances (for example the orthonormality
    /// check) are stated for `f64`; for a wider-epsilon type the same
    /// number of trusted digits sits proportionally higher. For `f64` this
    /// returns `tol_at_f64` unchanged. The computation happens in `f64`,
    /// so instrumented types do not tally it.
    fn calibrated(tol_at_f64: f64) -> Self {
        let ratio = Self::epsilon().to_f64_lossy() / f64::EPSILON;
        Self::from_f64_lossy(tol_at_f64 * ratio)
    }
}

impl Scalar for f64 {
    #[inline(always)]
    fn mac(self, x: Self, y: Self) -> Self {
        self + x * y
    }

    #[inline(always)]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline(always)]
    fn mac(self, x: Self, y: Self) -> Self {
        self + x * y
    }

    #[inline(always)]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mac_is_product_then_add() {
        assert_eq!(2.0_f64.mac(3.0, 4.0), 14.0);
        assert_eq!(2.0_f32.mac(3.0, 4.0), 14.0);
    }

    #[test]
    fn calibrated_is_identity_for_f64() {
        assert_eq!(f64::calibrated(1e-10), 1e-10);
        assert_eq!(f64::calibrated(1e-12), 1e-12);
    }

    #[test]
    fn calibrated_scales_with_epsilon_for_f32() {
        let expected = (1e-10 * (f32::EPSILON as f64 / f64::EPSILON)) as f32;
        assert_eq!(f32::calibrated(1e-10), expected);
        assert!(f32::calibrated(1e-10) > f32::EPSILON);
    }
}
