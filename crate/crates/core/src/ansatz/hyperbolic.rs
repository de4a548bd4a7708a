use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg3::{sym, Mat3, Vec3};
use crate::scalar::Real;
use crate::surface::{
    covariant_hessian, covariant_to_ambient, hyperbolic_jet, surface_gradient, Chart, FrameDerivs, GeometryTag,
    PointFrame, ScalarJet2,
};

use super::cutoff::radial_cutoff;
use super::params::{AnsatzParams, Geometry};
use super::sample::SurfaceFields;
use super::{check_support, Ansatz, Region};

/// `w = φ̂ φ sin(φx₁)`, `W = (φ̂ cos(φx₁)/v) Z − tDw` on an asymptotic chart, with `φ̂` a radial
/// cutoff of support radius `2δ` around the chart origin.
pub struct HyperbolicAnsatz<T> {
    chart: Arc<dyn Chart<T>>,
    params: AnsatzParams<T>,
}

/// Intermediate quantities at a surface point.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicParts<T> {
    pub frame: PointFrame<T>,
    pub phi: T,
    pub cutoff: T,
    pub cutoff_grad: Vec3<T>,
    pub df: Vec3<T>,
    pub z: Vec3<T>,
    pub v: T,
    pub dv: Vec3<T>,
    pub dz: Mat3<T>,
    /// `a = φ̂ cos(φf)/v`, the coefficient of `Z`.
    pub a: T,
    pub da: Vec3<T>,
    pub w: T,
    pub dw: Vec3<T>,
    pub d2w: Mat3<T>,
}

impl<T: Real> HyperbolicAnsatz<T> {
    pub fn new(chart: Arc<dyn Chart<T>>, params: AnsatzParams<T>) -> Result<Self> {
        params.validate()?;
        if params.geometry != Geometry::Hyperbolic {
            return Err(Error::Precondition(format!("expected hyperbolic parameters, got {}", params.geometry)));
        }
        if chart.tag() != GeometryTag::HyperbolicAsymptotic {
            return Err(Error::WrongGeometry(format!(
                "chart `{}` is tagged {}, the hyperbolic Ansatz needs asymptotic coordinates",
                chart.name(),
                chart.tag()
            )));
        }
        check_support(chart.as_ref(), params.delta + params.delta)?;
        let ansatz = HyperbolicAnsatz { chart, params };
        let f0 = PointFrame::at(ansatz.chart.as_ref(), [T::zero(); 2])?;
        if !(f0.gauss < T::zero()) {
            return Err(Error::WrongGeometry(format!("κ = {:e} ≥ 0 at the chart origin", f0.gauss.as_f64())));
        }
        Ok(ansatz)
    }

    pub fn chart(&self) -> &Arc<dyn Chart<T>> {
        &self.chart
    }

    pub fn parts(&self, x: [T; 2]) -> Result<HyperbolicParts<T>> {
        let jet = self.chart.jet(x);
        self.chart.check_domain(x)?;
        let frame = PointFrame::from_jet(self.chart.name(), x, &jet)?;
        let derivs = FrameDerivs::new(&frame, &jet);
        let hj = hyperbolic_jet(&frame, &derivs)?;
        if !(hj.v > T::zero()) {
            return Err(Error::Degenerate(format!("v = {:e} ≤ 0", hj.v.as_f64())));
        }
        let phi = self.params.frequency();
        let (c, cg, ch) = radial_cutoff(x, self.params.delta + self.params.delta);
        let (sn, cs) = (phi * x[0]).sin_cos();
        let (v, dv) = (hj.v, hj.dv);

        let w = c * phi * sn;
        let e0 = [T::one(), T::zero()];
        let mut dw = [T::zero(); 2];
        let mut d2w = [[T::zero(); 2]; 2];
        let mut da = [T::zero(); 2];
        for i in 0..2 {
            dw[i] = cg[i] * phi * sn + c * phi * phi * cs * e0[i];
            da[i] = cg[i] * cs / v - c * phi * sn * e0[i] / v - c * cs * dv[i] / (v * v);
            for j in 0..2 {
                d2w[i][j] = ch[i][j] * phi * sn + phi * phi * cs * (cg[i] * e0[j] + cg[j] * e0[i])
                    - c * phi * phi * phi * sn * e0[i] * e0[j];
            }
        }
        let hess = covariant_hessian(&frame, &ScalarJet2 { value: w, d1: dw, d2: d2w });
        Ok(HyperbolicParts {
            phi,
            cutoff: c,
            cutoff_grad: surface_gradient(&frame, cg),
            df: frame.dual[0],
            z: hj.z,
            v,
            dv: hj.dv_vector(&frame),
            dz: hj.dz_ambient(&frame),
            a: c * cs / v,
            da: surface_gradient(&frame, da),
            w,
            dw: surface_gradient(&frame, dw),
            d2w: covariant_to_ambient(&frame, &hess),
            frame,
        })
    }
}

impl<T: Real> HyperbolicParts<T> {
    pub fn fields(&self) -> SurfaceFields<T> {
        let f = &self.frame;
        SurfaceFields {
            coords: f.coords,
            frame: *f,
            area: f.area_density,
            tangential: [self.z * self.a, -self.dw],
            tangential_grad: [self.dz * self.a + self.z.outer(&self.da), -self.d2w],
            normal: [self.w, T::zero()],
            normal_grad: [self.dw, Vec3::zero()],
            normal_hessian: Some(self.d2w),
        }
    }

    /// `(cos(φf)/v) sym Z⊗Dφ̂ − (φ̂ cos(φf)/v²) sym Z⊗Dv − tD²w`, the closed form of `Υ` once
    /// `sym Z⊗Df = vΠ` is used, plus the term `a sym DZ`.
    pub fn upsilon_closed_form(&self, t: T) -> Mat3<T> {
        let cs = (self.phi * self.frame.coords[0]).cos();
        let v = self.v;
        sym(&self.z.outer(&self.cutoff_grad)) * (cs / v) - sym(&self.z.outer(&self.dv)) * (self.cutoff * cs / (v * v))
            + sym(&self.dz) * self.a
            - self.d2w * t
    }

    /// `|sym Z⊗Df − vΠ|`.
    pub fn asymptotic_defect(&self) -> T {
        (sym(&self.z.outer(&self.df)) - self.frame.shape_ambient * self.v).frobenius()
    }
}

impl<T: Real> Ansatz<T> for HyperbolicAnsatz<T> {
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
        Ok(self.parts(x)?.fields())
    }
}
