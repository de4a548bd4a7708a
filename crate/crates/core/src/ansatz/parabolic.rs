use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flows::{NetGeometry, NetPoint};
use crate::jet::Jet;
use crate::linalg3::Vec3;
use crate::scalar::Real;

use super::cutoff::cutoff;
use super::params::{AnsatzParams, Geometry};
use super::sample::SurfaceFields;
use super::{Ansatz, Region};

/// `y = V + tW + bν` in principal net coordinates, with `V = vY`, `W = −b_{x₁}X + wY`,
/// `v = ϖ var′(x₂)`, `var = var₀(x₂) cos(φx₂)`, `b = −Y(v)/λ`, `w = λv − Y(b)`.
pub struct ParabolicAnsatz<T> {
    net: Arc<dyn NetGeometry<T>>,
    params: AnsatzParams<T>,
}

/// Scalar ingredients at a net point; `Y(g) = η⁻¹∂₂g`, `g₁ = ∂₁g`.
#[derive(Clone, Copy, Debug)]
pub struct ParabolicParts<T> {
    pub point: NetPoint<T>,
    pub lambda: T,
    pub varrho: T,
    pub v: T,
    pub v1: T,
    pub yv: T,
    pub b: T,
    pub b1: T,
    pub b11: T,
    pub yb: T,
    pub yb1: T,
    pub w: T,
    pub w1: T,
    pub yw: T,
}

impl<T: Real> ParabolicAnsatz<T> {
    pub fn new(net: Arc<dyn NetGeometry<T>>, params: AnsatzParams<T>) -> Result<Self> {
        params.validate()?;
        if params.geometry != Geometry::Parabolic {
            return Err(Error::Precondition(format!("expected parabolic parameters, got {}", params.geometry)));
        }
        if params.half_length > net.half_length() || params.epsilon > net.half_width() {
            return Err(Error::Precondition(format!(
                "strip {} × {} exceeds the net {} × {}",
                params.half_length,
                params.epsilon,
                net.half_length(),
                net.half_width()
            )));
        }
        Ok(ParabolicAnsatz { net, params })
    }

    pub fn net(&self) -> &Arc<dyn NetGeometry<T>> {
        &self.net
    }

    /// Jet of `var′` in `x₂` (needs `var` to fourth order).
    fn var_prime(&self, x2: T) -> Jet<T> {
        let phi = self.params.frequency();
        let eps = self.params.epsilon;
        let c = cutoff(x2 / eps);
        let mut c0 = [T::zero(); 5];
        let mut k = T::one();
        for (dst, ci) in c0.iter_mut().zip(c) {
            *dst = ci * k;
            k /= eps;
        }
        let (s, co) = (phi * x2).sin_cos();
        let mut trig = [T::zero(); 5];
        let mut p = T::one();
        for (i, ti) in trig.iter_mut().enumerate() {
            // d^i cos(φx)
            *ti = p * match i % 4 {
                0 => co,
                1 => -s,
                2 => -co,
                _ => s,
            };
            p *= phi;
        }
        let binom = [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [
            1.0, 3.0, 3.0, 1.0, 0.0,
        ], [1.0, 4.0, 6.0, 4.0, 1.0]];
        let mut var = [T::zero(); 5];
        for (n, vn) in var.iter_mut().enumerate() {
            for k in 0..=n {
                *vn += T::lit(binom[n][k]) * c0[k] * trig[n - k];
            }
        }
        Jet::from_univariate(1, [var[1], var[2], var[3], var[4]])
    }

    pub fn parts(&self, x: [T; 2]) -> Result<ParabolicParts<T>> {
        let point = self.net.point(x)?;
        let lambda = point.lambda.value();
        if lambda.abs() <= T::lit(1e-12) {
            return Err(Error::FlatPoint(format!("λ = {:e} at net ({}, {})", lambda.as_f64(), x[0], x[1])));
        }
        let vp = self.var_prime(x[1]);
        let eta_inv = point.eta.recip();
        let y = |g: &Jet<T>| eta_inv * g.d2();
        let v = point.varpi * vp;
        let yv = y(&v);
        let b = -(yv * point.lambda.recip());
        let yb = y(&b);
        let w = point.lambda * v - yb;
        let b1 = b.d1();
        Ok(ParabolicParts {
            lambda,
            varrho: point.varrho.value(),
            v: v.value(),
            v1: v.d1().value(),
            yv: yv.value(),
            b: b.value(),
            b1: b1.value(),
            b11: b1.d1().value(),
            yb: yb.value(),
            yb1: y(&b1).value(),
            w: w.value(),
            w1: w.d1().value(),
            yw: y(&w).value(),
            point,
        })
    }
}

impl<T: Real> ParabolicParts<T> {
    pub fn fields(&self) -> SurfaceFields<T> {
        let (xv, yv) = (self.point.x, self.point.y);
        let r = self.varrho;
        let tensor = |dx: Vec3<T>, dy: Vec3<T>| dx.outer(&xv) + dy.outer(&yv);
        let dv = tensor(yv * self.v1, xv * (-self.v * r) + yv * self.yv);
        let dw = tensor(xv * (-self.b11) + yv * self.w1, xv * (-(self.yb1 + r * self.w)) + yv * (self.yw - self.b1 * r));
        SurfaceFields {
            coords: self.point.net,
            frame: self.point.frame,
            area: self.point.eta.value(),
            tangential: [yv * self.v, xv * (-self.b1) + yv * self.w],
            tangential_grad: [dv, dw],
            normal: [self.b, T::zero()],
            normal_grad: [xv * self.b1 + yv * self.yb, Vec3::zero()],
            normal_hessian: None,
        }
    }

    /// `[v_{x₁} − vϱ, Y(v) + bλ, Y(b) − λv + w]`.
    pub fn compatibility_residuals(&self) -> [T; 3] {
        [
            self.v1 - self.v * self.varrho,
            self.yv + self.b * self.lambda,
            self.yb - self.lambda * self.v + self.w,
        ]
    }

    /// The explicit sum of squares for `|∇y + tP|²` in the net frame.
    pub fn gradient_sum_of_squares(&self, t: T) -> T {
        let two = T::lit(2.0);
        let r = self.varrho;
        let sq = |a: T| a * a;
        sq(t * self.b11)
            + sq(self.v1 + t * self.w1)
            + sq(self.v * r + t * (self.yb1 + r * self.w))
            + sq(self.yv + t * (self.yw - self.b1 * r) + self.b * self.lambda)
            + two * sq(self.b1)
            + sq(self.yb - (self.v + t * self.w) * self.lambda)
            + sq(self.w)
    }

    /// `|Υ|²` in closed form once the compatibility relations hold.
    pub fn upsilon_sq(&self, t: T) -> T {
        let r = self.varrho;
        let half = T::lit(0.5);
        let sq = |a: T| a * a;
        t * t * (sq(self.b11) + half * sq(self.w1 - self.yb1 - r * self.w) + sq(self.yw - self.b1 * r))
    }

    /// `Db − i(V + tW)Π + W`.
    pub fn normal_strain(&self, t: T) -> Vec3<T> {
        let f = self.fields();
        let s = f.frame.shape_ambient;
        f.normal_grad[0] - s * (f.tangential[0] + f.tangential[1] * t) + f.tangential[1]
    }
}

impl<T: Real> Ansatz<T> for ParabolicAnsatz<T> {
    fn params(&self) -> &AnsatzParams<T> {
        &self.params
    }

    fn chart_name(&self) -> &str {
        self.net.chart().name()
    }

    fn region(&self) -> Region<T> {
        let (a, e) = (self.params.half_length, self.params.epsilon);
        Region { lo: [-a, -e], hi: [a, e], oscillating: [false, true], support_radius: None }
    }

    fn fields(&self, x: [T; 2]) -> Result<SurfaceFields<T>> {
        Ok(self.parts(x)?.fields())
    }
}
