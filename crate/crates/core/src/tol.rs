//! The single absolute-tolerance comparator used across the crate.

/// Default absolute tolerance, in the same units as the distances.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Absolute tolerance for floating-point comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(DEFAULT_EPS)
    }
}

impl Tol {
    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    /// `a == b` within tolerance.
    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }

    /// `a <= b` within tolerance.
    #[inline]
    pub fn le(self, a: f64, b: f64) -> bool {
        a <= b + self.0
    }

    /// `a >= b` within tolerance.
    #[inline]
    pub fn ge(self, a: f64, b: f64) -> bool {
        a + self.0 >= b
    }

    /// `a > b` by more than the tolerance.
    #[inline]
    pub fn gt(self, a: f64, b: f64) -> bool {
        a > b + self.0
    }

    /// `a < b` by more than the tolerance.
    #[inline]
    pub fn lt(self, a: f64, b: f64) -> bool {
        a + self.0 < b
    }

    /// `|a| <= eps`.
    #[inline]
    pub fn is_zero(self, a: f64) -> bool {
        a.abs() <= self.0
    }
}
