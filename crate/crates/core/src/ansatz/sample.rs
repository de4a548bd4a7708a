use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg3::{sym, Mat3, Vec3};
use crate::scalar::Real;
use crate::shell::thickness_factor;
use crate::surface::PointFrame;

/// The shell decomposition `y = W + wν` at one point of `Ω`: tangential field, normal scalar,
/// their surface derivatives and their `t`-derivatives. Tangent tensors are stored as ambient
/// matrices that vanish on `ν`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Decomposition<T> {
    pub tangential: Vec3<T>,
    pub normal: T,
    /// `DW`: `DW · α = D_αW`.
    pub tangential_grad: Mat3<T>,
    pub normal_grad: Vec3<T>,
    pub tangential_t: Vec3<T>,
    pub normal_t: T,
}

impl<T: Real> Decomposition<T> {
    pub fn y(&self, frame: &PointFrame<T>) -> Vec3<T> {
        self.tangential + frame.normal * self.normal
    }
}

/// Per-surface-node data of an Ansatz affine in `t`: `W = W₀ + tW₁`, `w = w₀ + tw₁`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SurfaceFields<T> {
    /// Ansatz coordinates (chart or net).
    pub coords: [T; 2],
    #[serde(skip)]
    pub frame: PointFrame<T>,
    /// Area density with respect to the Ansatz coordinates.
    pub area: T,
    pub tangential: [Vec3<T>; 2],
    pub tangential_grad: [Mat3<T>; 2],
    pub normal: [T; 2],
    pub normal_grad: [Vec3<T>; 2],
    pub normal_hessian: Option<Mat3<T>>,
}

impl<T: Real> SurfaceFields<T> {
    pub fn zero(coords: [T; 2], frame: PointFrame<T>, area: T) -> Self {
        SurfaceFields {
            coords,
            frame,
            area,
            tangential: [Vec3::zero(); 2],
            tangential_grad: [Mat3::zero(); 2],
            normal: [T::zero(); 2],
            normal_grad: [Vec3::zero(); 2],
            normal_hessian: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.normal.iter().all(|w| *w == T::zero())
            && self.normal_grad.iter().all(|v| *v == Vec3::zero())
            && self.tangential.iter().all(|v| *v == Vec3::zero())
            && self.tangential_grad.iter().all(|m| *m == Mat3::zero())
    }

    pub fn decomposition(&self, t: T) -> Decomposition<T> {
        Decomposition {
            tangential: self.tangential[0] + self.tangential[1] * t,
            normal: self.normal[0] + self.normal[1] * t,
            tangential_grad: self.tangential_grad[0] + self.tangential_grad[1] * t,
            normal_grad: self.normal_grad[0] + self.normal_grad[1] * t,
            tangential_t: self.tangential[1],
            normal_t: self.normal[1],
        }
    }

    pub fn y(&self, t: T) -> Vec3<T> {
        self.tangential[0] + self.tangential[1] * t + self.frame.normal * (self.normal[0] + self.normal[1] * t)
    }

    /// `dz = area · (1 + tλ₁)(1 + tλ₂) dx dt`.
    pub fn volume_element(&self, t: T) -> Result<T> {
        Ok(self.area * thickness_factor(&self.frame, t)?)
    }

    pub fn sample(&self, t: T) -> Result<DisplacementSample<T>> {
        DisplacementSample::new(&self.frame, self.coords, t, self.decomposition(t), self.tangential)
    }
}

/// Everything derived from `y` at one point `(x, t)` of the shell.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DisplacementSample<T> {
    pub coords: [T; 2],
    pub t: T,
    pub parts: Decomposition<T>,
    /// `[W₀, W₁]` with `W = W₀ + tW₁` (for the parabolic Ansatz `[V, W]`).
    pub tangential_coeffs: [Vec3<T>; 2],
    pub y: Vec3<T>,
    pub grad: Mat3<T>,
    pub p: Mat3<T>,
    /// `Υ = sym DW + wΠ`.
    pub upsilon: Mat3<T>,
    /// `X = Dw − i(W)Π + W_t`.
    pub x: Vec3<T>,
}

impl<T: Real> DisplacementSample<T> {
    pub fn new(
        frame: &PointFrame<T>,
        coords: [T; 2],
        t: T,
        parts: Decomposition<T>,
        tangential_coeffs: [Vec3<T>; 2],
    ) -> Result<Self> {
        let grad = assemble_ambient_gradient(frame, t, &parts)?;
        let s = frame.shape_ambient;
        Ok(DisplacementSample {
            coords,
            t,
            parts,
            tangential_coeffs,
            y: parts.y(frame),
            grad,
            p: p_tensor(&grad, frame),
            upsilon: sym(&parts.tangential_grad) + s * parts.normal,
            x: parts.normal_grad - s * parts.tangential + parts.tangential_t,
        })
    }
}

/// Solves `∇y · [β₁ β₂ ν] = [c₁ c₂ c₃]` with `βₖ = (I + tS)∂ₖr`,
/// `cₖ = D_{∂ₖ}W + w S∂ₖr + [∂ₖw − Π(W, ∂ₖr)]ν` and `c₃ = W_t + w_tν`.
pub fn assemble_ambient_gradient<T: Real>(frame: &PointFrame<T>, t: T, parts: &Decomposition<T>) -> Result<Mat3<T>> {
    thickness_factor(frame, t)?;
    let s = frame.shape_ambient;
    let nu = frame.normal;
    let sw = s * parts.tangential;
    let mut c = [Vec3::zero(); 3];
    let mut beta = [Vec3::zero(); 2];
    for k in 0..2 {
        let rk = frame.tangents[k];
        let srk = s * rk;
        c[k] = parts.tangential_grad * rk + srk * parts.normal + nu * (parts.normal_grad.dot(&rk) - sw.dot(&rk));
        beta[k] = rk + srk * t;
    }
    c[2] = parts.tangential_t + nu * parts.normal_t;
    let b = Mat3::from_cols(beta[0], beta[1], nu);
    let inv = b.inverse().ok_or_else(|| {
        Error::ThicknessTooLarge(format!(
            "singular shell basis at x = ({}, {}), t = {:e}",
            frame.coords[0].as_f64(),
            frame.coords[1].as_f64(),
            t.as_f64()
        ))
    })?;
    Ok(Mat3::from_cols(c[0], c[1], c[2]) * inv)
}

/// `P(y) = ∇y · S`, the shape operator extended by zero on `ν`.
pub fn p_tensor<T: Real>(grad: &Mat3<T>, frame: &PointFrame<T>) -> Mat3<T> {
    *grad * frame.shape_ambient
}

/// `u = z + h^τ y`, `∇u = I + h^τ∇y`; rejects `det ∇u ≤ 0`.
pub fn deformation_at<T: Real>(scale: T, sample: &DisplacementSample<T>, z: Vec3<T>) -> Result<(Vec3<T>, Mat3<T>)> {
    let b = sample.grad * scale;
    if b.det_identity_plus() <= T::zero() {
        return Err(Error::ThicknessTooLarge(format!(
            "det ∇u ≤ 0 at x = ({}, {}), t = {:e}",
            sample.coords[0].as_f64(),
            sample.coords[1].as_f64(),
            sample.t.as_f64()
        )));
    }
    Ok((z + sample.y * scale, Mat3::identity() + b))
}

/// Both sides of `|∇y + tP|² = |DW + wΠ|² + |Dw − i(W)Π|² + |W_t|² + w_t²`.
pub fn gradient_identity<T: Real>(frame: &PointFrame<T>, s: &DisplacementSample<T>) -> (T, T) {
    let p = &s.parts;
    let sh = frame.shape_ambient;
    let lhs = (s.grad + s.p * s.t).frobenius_sq();
    let rhs = (p.tangential_grad + sh * p.normal).frobenius_sq()
        + (p.normal_grad - sh * p.tangential).norm_sq()
        + p.tangential_t.norm_sq()
        + p.normal_t * p.normal_t;
    (lhs, rhs)
}

/// Both sides of `|sym∇y + t symP|² = |Υ|² + ½|X|² + w_t²`.
pub fn symmetric_identity<T: Real>(s: &DisplacementSample<T>) -> (T, T) {
    let lhs = sym(&(s.grad + s.p * s.t)).frobenius_sq();
    let rhs = s.upsilon.frobenius_sq() + T::lit(0.5) * s.x.norm_sq() + s.parts.normal_t * s.parts.normal_t;
    (lhs, rhs)
}

/// `|lhs − rhs| / (1 + |∇y|²)`.
pub fn identity_residual<T: Real>((lhs, rhs): (T, T), grad: &Mat3<T>) -> T {
    (lhs - rhs).abs() / (T::one() + grad.frobenius_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Cylinder, Plane, Saddle};

    #[test]
    fn constant_field_has_zero_gradient() {
        let frame = PointFrame::<f64>::at(&Saddle, [0.2, -0.3]).unwrap();
        // a constant ambient vector c: W = Pc, w = ⟨c, ν⟩, DW = −wS, Dw = SW
        let c = Vec3::new(0.3, -1.2, 0.7);
        let w = c.dot(&frame.normal);
        let wt = frame.projector() * c;
        let parts = Decomposition {
            tangential: wt,
            normal: w,
            tangential_grad: frame.shape_ambient * -w,
            normal_grad: frame.shape_ambient * wt,
            tangential_t: Vec3::zero(),
            normal_t: 0.0,
        };
        for t in [0.0, 0.05, -0.1] {
            let g = assemble_ambient_gradient(&frame, t, &parts).unwrap();
            assert!(g.max_abs() < 1e-14, "{g:?}");
        }
    }

    #[test]
    fn normal_field_on_cylinder() {
        let frame = PointFrame::<f64>::at(&Cylinder, [0.0, 0.0]).unwrap();
        assert!((frame.position - Vec3::new(1.0, 0.0, 0.0)).max_abs() < 1e-15);
        let parts = Decomposition { normal: 1.0, ..Decomposition::default() };
        let g = assemble_ambient_gradient(&frame, 0.0, &parts).unwrap();
        assert!((g - Mat3::diag(0.0, 1.0, 0.0)).max_abs() < 1e-14, "{g:?}");
        // at thickness t the normal field has gradient S(I + tS)⁻¹
        let g = assemble_ambient_gradient(&frame, 0.25, &parts).unwrap();
        assert!((g - Mat3::diag(0.0, 0.8, 0.0)).max_abs() < 1e-14);
        assert!(assemble_ambient_gradient(&frame, -1.0, &parts).is_err());
    }

    #[test]
    fn p_tensor_cases() {
        let plane = PointFrame::<f64>::at(&Plane, [0.1, 0.2]).unwrap();
        let g = Mat3::from_cols(Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 0.0), Vec3::new(0.2, 0.0, 4.0));
        assert_eq!(p_tensor(&g, &plane), Mat3::zero());
        let cyl = PointFrame::<f64>::at(&Cylinder, [0.4, 0.9]).unwrap();
        assert!((p_tensor(&Mat3::identity(), &cyl) - cyl.shape_ambient).max_abs() < 1e-15);
        // bilinear definition P(a, b) = ⟨∇_{Sa} y, b⟩
        let p = p_tensor(&g, &cyl);
        let basis = [cyl.directions[0], cyl.directions[1], cyl.normal];
        for a in &basis {
            for b in &basis {
                let direct = (g * (cyl.shape_ambient * *a)).dot(b);
                assert!(((p * *a).dot(b) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deformation_of_zero_field() {
        let frame = PointFrame::<f64>::at(&Plane, [0.1, 0.2]).unwrap();
        let s = DisplacementSample::new(&frame, [0.1, 0.2], 0.0, Decomposition::default(), [Vec3::zero(); 2]).unwrap();
        let z = Vec3::new(0.1, 0.2, 0.0);
        let (u, du) = deformation_at(1e-3, &s, z).unwrap();
        assert_eq!(u, z);
        assert_eq!(du, Mat3::identity());
    }
}
