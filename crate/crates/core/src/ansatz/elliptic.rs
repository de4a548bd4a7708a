use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg3::{Mat3, Vec3};
use crate::scalar::Real;
use crate::surface::{covariant_hessian, covariant_to_ambient, surface_gradient, Chart, PointFrame, ScalarJet2};

use super::cutoff::radial_cutoff;
use super::params::{AnsatzParams, Geometry};
use super::sample::SurfaceFields;
use super::{check_support, Ansatz, Region};

/// `w = φ̂ sin(φx₁)` with `φ = h^{-1/2}`, `W = −tDw`.
pub struct EllipticAnsatz<T> {
    chart: Arc<dyn Chart<T>>,
    params: AnsatzParams<T>,
}

impl<T: Real> EllipticAnsatz<T> {
    pub fn new(chart: Arc<dyn Chart<T>>, params: AnsatzParams<T>) -> Result<Self> {
        params.validate()?;
        if params.geometry != Geometry::Elliptic {
            return Err(Error::Precondition(format!("expected elliptic parameters, got {}", params.geometry)));
        }
        check_support(chart.as_ref(), params.delta + params.delta)?;
        let ansatz = EllipticAnsatz { chart, params };
        ansatz.frame(&[T::zero(); 2])?;
        Ok(ansatz)
    }

    fn frame(&self, x: &[T; 2]) -> Result<PointFrame<T>> {
        let f = PointFrame::at(self.chart.as_ref(), *x)?;
        if !(f.gauss > T::zero()) {
            return Err(Error::WrongGeometry(format!(
                "elliptic Ansatz needs κ > 0, got κ = {:e} at ({}, {})",
                f.gauss.as_f64(),
                x[0].as_f64(),
                x[1].as_f64()
            )));
        }
        Ok(f)
    }

    /// `w`, `Dw`, ambient `D²w`.
    pub fn normal_parts(&self, frame: &PointFrame<T>) -> (T, Vec3<T>, Mat3<T>) {
        let x = frame.coords;
        let phi = self.params.frequency();
        let (c, cg, ch) = radial_cutoff(x, self.params.delta + self.params.delta);
        let (sn, cs) = (phi * x[0]).sin_cos();
        let e0 = [T::one(), T::zero()];
        let mut dw = [T::zero(); 2];
        let mut d2w = [[T::zero(); 2]; 2];
        for i in 0..2 {
            dw[i] = cg[i] * sn + c * phi * cs * e0[i];
            for j in 0..2 {
                d2w[i][j] =
                    ch[i][j] * sn + phi * cs * (cg[i] * e0[j] + cg[j] * e0[i]) - c * phi * phi * sn * e0[i] * e0[j];
            }
        }
        let w = c * sn;
        let hess = covariant_hessian(frame, &ScalarJet2 { value: w, d1: dw, d2: d2w });
        (w, surface_gradient(frame, dw), covariant_to_ambient(frame, &hess))
    }
}

impl<T: Real> Ansatz<T> for EllipticAnsatz<T> {
    fn params(&self) -> &AnsatzParams<T> {
        &self.params
    }

    fn chart_name(&self) -> &str {
        self.chart.name()
    }

    fn region(&self) -> Region<T> {
        let r = self.params.delta + self.params.delta;
        Region { lo: [-r, -r], hi: [r, r], oscillating: [true, false], support_radius: Some(r) }
    }

    fn fields(&self, x: [T; 2]) -> Result<SurfaceFields<T>> {
        let frame = self.frame(&x)?;
        let (w, dw, d2w) = self.normal_parts(&frame);
        Ok(SurfaceFields {
            coords: x,
            frame,
            area: frame.area_density,
            tangential: [Vec3::zero(), -dw],
            tangential_grad: [Mat3::zero(), -d2w],
            normal: [w, T::zero()],
            normal_grad: [dw, Vec3::zero()],
            normal_hessian: Some(d2w),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{gradient_identity, identity_residual, oracle::oracle_check, symmetric_identity};
    use crate::surface::{Saddle, SphereCap};

    fn ansatz(h: f64) -> EllipticAnsatz<f64> {
        EllipticAnsatz::new(Arc::new(SphereCap { radius: 0.6 }), AnsatzParams::new(Geometry::Elliptic, h)).unwrap()
    }

    #[test]
    fn surface_values_and_strain_parts() {
        let a = ansatz(1e-3);
        for x in [[0.1, 0.05], [-0.3, 0.2], [0.2, -0.4]] {
            let f = a.fields(x).unwrap();
            let s0 = f.sample(0.0).unwrap();
            assert_eq!(s0.y, f.frame.normal * f.normal[0]);
            assert!(s0.x.max_abs() < 1e-12 * (1.0 + f.normal_grad[0].max_abs()));
            let t = 3e-4;
            let s = f.sample(t).unwrap();
            let d2w = f.normal_hessian.unwrap();
            let sh = f.frame.shape_ambient;
            assert!((s.upsilon - (d2w * -t + sh * f.normal[0])).max_abs() < 1e-10);
            assert!((s.x - sh * f.normal_grad[0] * t).max_abs() < 1e-10);
        }
    }

    #[test]
    fn oracle_and_identities() {
        let a = ansatz(1e-3);
        for (x, t) in [([0.1, 0.05], 2e-4), ([-0.35, 0.2], -4e-4), ([0.0, 0.45], 0.0)] {
            let c = oracle_check(&a, x, t).unwrap();
            assert!(c.relative_error < 1e-6, "{:e}", c.relative_error);
            let s = a.sample(x, t).unwrap();
            let f = a.fields(x).unwrap();
            assert!(identity_residual(gradient_identity(&f.frame, &s), &s.grad) < 1e-8);
            assert!(identity_residual(symmetric_identity(&s), &s.grad) < 1e-8);
        }
    }

    #[test]
    fn rejects_negative_curvature() {
        let p = AnsatzParams::new(Geometry::Elliptic, 1e-3);
        assert!(matches!(EllipticAnsatz::new(Arc::new(Saddle), p), Err(Error::WrongGeometry(_))));
    }
}
