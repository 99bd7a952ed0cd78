//! Scalar abstraction for the numerical core.
//!
//! All ball geometry and norm machinery is generic over a floating point
//! scalar. `f64` is the working type throughout the CLI and the diagnostic
//! suites; `f32` is supported for cheap exploratory runs.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point scalar: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from f64, used for constants and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Widening (or identity) conversion to f64 for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type C<R> = Complex<R>;

/// Pairwise (tree) summation. Deterministic for a fixed slice regardless of
/// how the caller produced the terms, and far more accurate than a naive
/// left fold on long node sums.
pub fn tree_sum<R: Real>(xs: &[R]) -> R {
    match xs.len() {
        0 => R::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

/// Pairwise summation of complex terms.
pub fn tree_sum_c<R: Real>(xs: &[C<R>]) -> C<R> {
    match xs.len() {
        0 => C::new(R::zero(), R::zero()),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            tree_sum_c(&xs[..mid]) + tree_sum_c(&xs[mid..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sum_matches_exact_small() {
        let xs: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        assert_eq!(tree_sum(&xs), 5050.0);
    }

    #[test]
    fn tree_sum_empty_is_zero() {
        assert_eq!(tree_sum::<f64>(&[]), 0.0);
    }
}
