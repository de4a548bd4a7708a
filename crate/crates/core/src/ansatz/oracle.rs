use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd;
use crate::linalg3::{Mat3, Vec3};
use crate::scalar::Real;

use super::Ansatz;

/// Assembled gradient next to the finite-difference one.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleCheck<T> {
    pub assembled: Mat3<T>,
    pub differenced: Mat3<T>,
    /// `max |assembled − differenced| / (1 + max |assembled|)`.
    pub relative_error: T,
}

/// `∇y` from fourth-order central differences of `y∘Ψ` and `Ψ(x, t) = r(x) + tν(x)` in the
/// Ansatz coordinates, `∇y = ∂(y∘Ψ) · (∂Ψ)⁻¹`.
pub fn fd_gradient<T: Real>(ansatz: &dyn Ansatz<T>, x: [T; 2], t: T, step: T) -> Result<Mat3<T>> {
    let nan = Vec3::new(T::nan(), T::nan(), T::nan());
    let eval = |p: [T; 2], tt: T| -> (Vec3<T>, Vec3<T>) {
        match ansatz.fields(p) {
            Ok(f) => (f.y(tt), f.frame.position + f.frame.normal * tt),
            Err(_) => (nan, nan),
        }
    };
    let y_at = |p: [T; 2]| eval(p, t).0;
    let psi_at = |p: [T; 2]| eval(p, t).1;
    let mut dy = [Vec3::zero(); 3];
    let mut dpsi = [Vec3::zero(); 3];
    for (k, (i, j)) in [(1, 0), (0, 1)].into_iter().enumerate() {
        dy[k] = fd::partial(&y_at, x, i, j, step);
        dpsi[k] = fd::partial(&psi_at, x, i, j, step);
    }
    let in_t = |g: &dyn Fn(T) -> Vec3<T>| -> Vec3<T> {
        let mut acc = Vec3::zero();
        for &(k, c) in fd::D1.iter() {
            acc += g(t + T::lit(k as f64) * step) * T::lit(c);
        }
        acc * (T::one() / step)
    };
    dy[2] = in_t(&|tt| eval(x, tt).0);
    dpsi[2] = in_t(&|tt| eval(x, tt).1);
    let jac = Mat3::from_cols(dpsi[0], dpsi[1], dpsi[2]);
    let inv = jac.inverse().ok_or_else(|| Error::Degenerate("singular shell parametrization".into()))?;
    let g = Mat3::from_cols(dy[0], dy[1], dy[2]) * inv;
    if !g.max_abs().is_finite() {
        return Err(Error::OutOfDomain { chart: ansatz.chart_name().to_string(), x1: x[0].as_f64(), x2: x[1].as_f64() });
    }
    Ok(g)
}

/// Compares the assembled gradient with [`fd_gradient`] at step `c/φ`.
pub fn oracle_check<T: Real>(ansatz: &dyn Ansatz<T>, x: [T; 2], t: T) -> Result<OracleCheck<T>> {
    let phi = ansatz.params().frequency().max(T::one());
    let step = T::lit(1e-3) / phi;
    let assembled = ansatz.sample(x, t)?.grad;
    let differenced = fd_gradient(ansatz, x, t, step)?;
    let relative_error = (assembled - differenced).max_abs() / (T::one() + assembled.max_abs());
    Ok(OracleCheck { assembled, differenced, relative_error })
}
