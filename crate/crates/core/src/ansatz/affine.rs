use std::sync::Arc;

use crate::error::Result;
use crate::linalg3::Mat3;
use crate::scalar::Real;
use crate::surface::{Chart, PointFrame};

use super::params::AnsatzParams;
use super::sample::SurfaceFields;
use super::{Ansatz, Region};

/// `y(z) = Mz` on a chart rectangle, written in shell coordinates. Its gradient is `M` at every
/// point, which makes it a reference for the assembly and for the energy functionals.
pub struct AffineField<T> {
    chart: Arc<dyn Chart<T>>,
    params: AnsatzParams<T>,
    m: Mat3<T>,
    lo: [T; 2],
    hi: [T; 2],
}

impl<T: Real> AffineField<T> {
    pub fn new(chart: Arc<dyn Chart<T>>, params: AnsatzParams<T>, m: Mat3<T>, lo: [T; 2], hi: [T; 2]) -> Result<Self> {
        for p in [lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]] {
            chart.check_domain(p)?;
        }
        Ok(AffineField { chart, params, m, lo, hi })
    }

    /// `y = (R − I)z / h^τ`, so that `u = Rz`.
    pub fn rigid(chart: Arc<dyn Chart<T>>, params: AnsatzParams<T>, r: Mat3<T>, lo: [T; 2], hi: [T; 2]) -> Result<Self> {
        let m = (r - Mat3::identity()) * (T::one() / params.scale());
        Self::new(chart, params, m, lo, hi)
    }
}

impl<T: Real> Ansatz<T> for AffineField<T> {
    fn params(&self) -> &AnsatzParams<T> {
        &self.params
    }

    fn chart_name(&self) -> &str {
        self.chart.name()
    }

    fn region(&self) -> Region<T> {
        Region { lo: self.lo, hi: self.hi, oscillating: [false, false], support_radius: None }
    }

    fn fields(&self, x: [T; 2]) -> Result<SurfaceFields<T>> {
        let f = PointFrame::at(self.chart.as_ref(), x)?;
        let (m, s, p, nu) = (self.m, f.shape_ambient, f.projector(), f.normal);
        let mp = m * f.position;
        let mn = m * nu;
        let (w0, w1) = (mp.dot(&nu), mn.dot(&nu));
        let mt_nu = m.transpose() * nu;
        Ok(SurfaceFields {
            coords: x,
            frame: f,
            area: f.area_density,
            tangential: [p * mp, p * mn],
            tangential_grad: [p * m * p - s * w0, p * m * s - s * w1],
            normal: [w0, w1],
            normal_grad: [p * mt_nu + s * mp, s * mt_nu + s * mn],
            normal_hessian: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::params::Geometry;
    use crate::ansatz::{gradient_identity, identity_residual, symmetric_identity};
    use crate::surface::{Cylinder, Saddle, SphereCap};

    #[test]
    fn assembled_gradient_is_the_matrix() {
        let m = Mat3([[0.3, -1.1, 0.4], [2.0, 0.1, -0.7], [0.5, 0.9, -0.2]]);
        let params = AnsatzParams::new(Geometry::Hyperbolic, 0.01);
        let charts: [Arc<dyn Chart<f64>>; 3] = [Arc::new(Saddle), Arc::new(Cylinder), Arc::new(SphereCap { radius: 0.6 })];
        for chart in charts {
            let a = AffineField::new(chart, params, m, [-0.3, -0.3], [0.3, 0.3]).unwrap();
            for (x, t) in [([0.1, 0.2], 0.0), ([-0.25, 0.05], 0.004), ([0.2, -0.2], -0.005)] {
                let f = a.fields(x).unwrap();
                let s = f.sample(t).unwrap();
                assert!((s.grad - m).max_abs() < 1e-12, "{:?}", s.grad - m);
                let z = f.frame.position + f.frame.normal * t;
                assert!((s.y - m * z).max_abs() < 1e-12);
                assert!(identity_residual(gradient_identity(&f.frame, &s), &s.grad) < 1e-12);
                assert!(identity_residual(symmetric_identity(&s), &s.grad) < 1e-12);
            }
        }
    }
}
