//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts a literal. Panics only if the target cannot represent finite `f64`s, which
    /// neither implementor does.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative threshold used by iterative kernels (Jacobi sweeps, Newton steps).
    fn tiny() -> Self;
}

impl Real for f32 {
    fn tiny() -> Self {
        4.0 * f32::EPSILON
    }
}

impl Real for f64 {
    fn tiny() -> Self {
        1e-14
    }
}

/// Pairwise summation of a slice; the grouping depends only on the slice length, so results are
/// reproducible regardless of how the inputs were produced.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        let mut acc = T::zero();
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 45.0);
    }

    #[test]
    fn pairwise_beats_naive_on_ill_conditioned_sum() {
        let n = 1 << 20;
        let xs = vec![0.1f32; n];
        let naive: f32 = xs.iter().copied().fold(0.0, |a, b| a + b);
        let exact = 0.1f64 * n as f64;
        let pw = pairwise_sum(&xs) as f64;
        assert!((pw - exact).abs() < (naive as f64 - exact).abs());
    }
}
