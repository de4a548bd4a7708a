use serde::Serialize;

use super::chart::Chart;
use super::frame::{FrameDerivs, PointFrame, Sym2};
use crate::error::{Error, Result};
use crate::linalg3::{Mat3, Vec3};
use crate::scalar::Real;

/// Value and chart partials up to order two of a scalar field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScalarJet2<T> {
    pub value: T,
    pub d1: [T; 2],
    pub d2: Sym2<T>,
}

/// `Qα = ⟨α, e₂⟩e₁ − ⟨α, e₁⟩e₂`.
pub fn rotate_q<T: Real>(frame: &PointFrame<T>, alpha: &Vec3<T>) -> Vec3<T> {
    rotate_q_in(&frame.directions, alpha)
}

/// Same rotation computed in an arbitrary positively oriented orthonormal tangent basis.
pub fn rotate_q_in<T: Real>(basis: &[Vec3<T>; 2], alpha: &Vec3<T>) -> Vec3<T> {
    basis[0] * alpha.dot(&basis[1]) - basis[1] * alpha.dot(&basis[0])
}

/// `Df = g^{ij} ∂_jf ∂_ir`.
pub fn surface_gradient<T: Real>(frame: &PointFrame<T>, partials: [T; 2]) -> Vec3<T> {
    frame.dual[0] * partials[0] + frame.dual[1] * partials[1]
}

/// Covariant components `∂_i∂_jf − Γ^k_ij ∂_kf`.
pub fn covariant_hessian<T: Real>(frame: &PointFrame<T>, field: &ScalarJet2<T>) -> Sym2<T> {
    let mut h = field.d2;
    for (i, row) in h.iter_mut().enumerate() {
        for (j, hij) in row.iter_mut().enumerate() {
            *hij -= frame.christoffel[0][i][j] * field.d1[0] + frame.christoffel[1][i][j] * field.d1[1];
        }
    }
    h
}

/// Ambient matrix `Σ H_ij r^i ⊗ r^j` of a covariant 2-tensor, acting on tangent vectors.
pub fn covariant_to_ambient<T: Real>(frame: &PointFrame<T>, h: &Sym2<T>) -> Mat3<T> {
    let mut m = Mat3::zero();
    for i in 0..2 {
        for j in 0..2 {
            m += frame.dual[i].outer(&frame.dual[j]) * h[i][j];
        }
    }
    m
}

fn require_hyperbolic<T: Real>(frame: &PointFrame<T>) -> Result<()> {
    if !(frame.gauss < T::zero()) {
        return Err(Error::WrongGeometry(format!(
            "hyperbolic construction needs κ < 0, got κ = {:e}",
            frame.gauss.as_f64()
        )));
    }
    Ok(())
}

/// `Z = e₁(f)e₁ − e₂(f)e₂` and `v = |Df|²/(λ₁ − λ₂)`.
pub fn hyperbolic_z_v<T: Real>(frame: &PointFrame<T>, df: &Vec3<T>) -> Result<(Vec3<T>, T)> {
    require_hyperbolic(frame)?;
    let n2 = df.norm_sq();
    if !(n2 > T::zero()) {
        return Err(Error::Degenerate("Df = 0".into()));
    }
    let [e1, e2] = frame.directions;
    let z = e1 * df.dot(&e1) - e2 * df.dot(&e2);
    Ok((z, n2 / (frame.curvatures[0] - frame.curvatures[1])))
}

/// `Z`, `v` for `f = x₁` together with their first derivatives along the chart coordinates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HyperbolicJet<T> {
    pub z: Vec3<T>,
    pub v: T,
    /// `dz[k] = D_{∂_k} Z` (covariant derivative).
    pub dz: [Vec3<T>; 2],
    pub dv: [T; 2],
}

impl<T: Real> HyperbolicJet<T> {
    /// Ambient matrix of `DZ`: `Σ_k D_{∂_k}Z ⊗ r^k`.
    pub fn dz_ambient(&self, frame: &PointFrame<T>) -> Mat3<T> {
        self.dz[0].outer(&frame.dual[0]) + self.dz[1].outer(&frame.dual[1])
    }

    /// `Dv` as a tangent vector.
    pub fn dv_vector(&self, frame: &PointFrame<T>) -> Vec3<T> {
        surface_gradient(frame, self.dv)
    }
}

/// Uses the chart form `Z^i = (2/s)(S^i_j − ½H δ^i_j) g^{j1}`, `v = g^{11}/s` with
/// `s = λ₁ − λ₂ = sqrt(H² − 4 det S)`.
pub fn hyperbolic_jet<T: Real>(frame: &PointFrame<T>, derivs: &FrameDerivs<T>) -> Result<HyperbolicJet<T>> {
    require_hyperbolic(frame)?;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let s = &frame.shape;
    let gi = &frame.metric_inv;
    let h = s[0][0] + s[1][1];
    let sd = frame.curvatures[0] - frame.curvatures[1];
    let comps = |s: &Sym2<T>, g1: [T; 2], h: T| -> [T; 2] {
        [
            (s[0][0] - half * h) * g1[0] + s[0][1] * g1[1],
            s[1][0] * g1[0] + (s[1][1] - half * h) * g1[1],
        ]
    };
    let g1 = [gi[0][0], gi[1][0]];
    let zc0 = comps(s, g1, h);
    let zc = [two * zc0[0] / sd, two * zc0[1] / sd];
    let v = gi[0][0] / sd;

    let mut dz = [Vec3::zero(); 2];
    let mut dv = [T::zero(); 2];
    for k in 0..2 {
        let ds = &derivs.shape[k];
        let dgi = &derivs.metric_inv[k];
        let dh = ds[0][0] + ds[1][1];
        let dk = ds[0][0] * s[1][1] + s[0][0] * ds[1][1] - ds[0][1] * s[1][0] - s[0][1] * ds[1][0];
        let dsd = (h * dh - two * dk) / sd;
        let a = comps(ds, g1, dh);
        let b = comps(s, [dgi[0][0], dgi[1][0]], h);
        let mut dzc = [T::zero(); 2];
        for i in 0..2 {
            dzc[i] = -dsd / sd * zc[i] + two / sd * (a[i] + b[i]);
            dzc[i] += frame.christoffel[i][k][0] * zc[0] + frame.christoffel[i][k][1] * zc[1];
        }
        dz[k] = frame.to_ambient(dzc);
        dv[k] = dgi[0][0] / sd - v * dsd / sd;
    }
    Ok(HyperbolicJet { z: frame.to_ambient(zc), v, dz, dv })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticResidual<T> {
    pub pi11: T,
    pub pi22: T,
    /// `|Π(QDf, QDf)|` for `f = x₁`.
    pub pi_qdf: T,
}

pub fn asymptotic_residual<T: Real, C: Chart<T> + ?Sized>(chart: &C, x: [T; 2]) -> Result<AsymptoticResidual<T>> {
    let f = PointFrame::at(chart, x)?;
    let qdf = rotate_q(&f, &surface_gradient(&f, [T::one(), T::zero()]));
    Ok(AsymptoticResidual {
        pi11: f.second_form[0][0].abs(),
        pi22: f.second_form[1][1].abs(),
        pi_qdf: f.second_form_at(&qdf, &qdf).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg3::sym;
    use crate::surface::chart::{Cylinder, Plane, Saddle, SphereCap};

    #[test]
    fn q_on_principal_directions() {
        let f = PointFrame::<f64>::at(&Saddle, [0.2, 0.1]).unwrap();
        let [e1, e2] = f.directions;
        assert!((rotate_q(&f, &e1) + e2).max_abs() < 1e-15);
        assert!((rotate_q(&f, &e2) - e1).max_abs() < 1e-15);
        let a = f.tangents[0] * 0.3 - f.tangents[1] * 1.7;
        assert!((rotate_q(&f, &rotate_q(&f, &a)) + a).max_abs() < 1e-14);
        assert!((rotate_q(&f, &a).norm() - a.norm()).abs() < 1e-14);
        let (s, c) = 0.77f64.sin_cos();
        let basis = [e1 * c + e2 * s, e2 * c - e1 * s];
        assert!((rotate_q_in(&basis, &a) - rotate_q(&f, &a)).max_abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let f = PointFrame::<f64>::at(&Plane, [0.1, 0.1]).unwrap();
        assert_eq!(surface_gradient(&f, [1.0, 0.0]), Vec3::new(1.0, 0.0, 0.0));
        let f = PointFrame::<f64>::at(&Saddle, [0.4, -0.3]).unwrap();
        let df = surface_gradient(&f, [0.7, -1.1]);
        assert!((df.dot(&f.tangents[0]) - 0.7).abs() < 1e-14);
        assert!((df.dot(&f.tangents[1]) + 1.1).abs() < 1e-14);
    }

    #[test]
    fn hessian_examples() {
        let f = PointFrame::<f64>::at(&Plane, [0.3, 0.0]).unwrap();
        let h = covariant_hessian(&f, &ScalarJet2 { value: 0.09, d1: [0.6, 0.0], d2: [[2.0, 0.0], [0.0, 0.0]] });
        assert_eq!(h, [[2.0, 0.0], [0.0, 0.0]]);
        let f = PointFrame::<f64>::at(&SphereCap::default(), [0.3, 0.2]).unwrap();
        let h = covariant_hessian(&f, &ScalarJet2 { value: 0.3, d1: [1.0, 0.0], d2: [[0.0; 2]; 2] });
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(h[i][j], -f.christoffel[0][i][j]);
            }
        }
    }

    #[test]
    fn z_v_at_saddle_origin() {
        let f = PointFrame::<f64>::at(&Saddle, [0.0, 0.0]).unwrap();
        let (z, v) = hyperbolic_z_v(&f, &surface_gradient(&f, [1.0, 0.0])).unwrap();
        assert!((z - Vec3::new(0.0, 1.0, 0.0)).max_abs() < 1e-15);
        assert!((v - 0.5).abs() < 1e-15);
        let (z, _) = hyperbolic_z_v(&f, &f.directions[0]).unwrap();
        assert!((z - f.directions[0]).max_abs() < 1e-15);
    }

    #[test]
    fn z_v_errors() {
        let f = PointFrame::<f64>::at(&SphereCap::default(), [0.0, 0.0]).unwrap();
        assert!(matches!(hyperbolic_z_v(&f, &Vec3::unit(0)), Err(Error::WrongGeometry(_))));
        let f = PointFrame::<f64>::at(&Cylinder, [0.0, 0.0]).unwrap();
        assert!(matches!(hyperbolic_z_v(&f, &Vec3::unit(2)), Err(Error::WrongGeometry(_))));
        let f = PointFrame::<f64>::at(&Saddle, [0.0, 0.0]).unwrap();
        assert!(matches!(hyperbolic_z_v(&f, &Vec3::zero()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn z_v_closed_form_and_sym_identity() {
        for x in [[0.3, -0.5], [-0.8, 0.6], [0.05, 0.9]] {
            let f = PointFrame::<f64>::at(&Saddle, x).unwrap();
            let df = surface_gradient(&f, [1.0, 0.0]);
            let (z, v) = hyperbolic_z_v(&f, &df).unwrap();
            let d = 1.0 + x[0] * x[0] + x[1] * x[1];
            let v_ref = d.sqrt() * (1.0 + x[0] * x[0]).sqrt() / (2.0 * (1.0 + x[1] * x[1]).sqrt());
            assert!((v - v_ref).abs() < 1e-14);
            let lhs = sym(&z.outer(&df));
            let rhs = f.shape_ambient * v;
            assert!((lhs - rhs).max_abs() < 1e-13);
            let jet = hyperbolic_jet(&f, &FrameDerivs::new(&f, &Saddle.jet(x))).unwrap();
            assert!((jet.z - z).max_abs() < 1e-14 && (jet.v - v).abs() < 1e-14);
        }
    }

    #[test]
    fn hyperbolic_jet_matches_differences() {
        let x = [0.35, -0.25];
        let f = PointFrame::<f64>::at(&Saddle, x).unwrap();
        let jet = hyperbolic_jet(&f, &FrameDerivs::new(&f, &Saddle.jet(x))).unwrap();
        let h = 1e-5;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let eval = |y: [f64; 2]| {
                let fy = PointFrame::<f64>::at(&Saddle, y).unwrap();
                hyperbolic_z_v(&fy, &surface_gradient(&fy, [1.0, 0.0])).unwrap()
            };
            let ((zp, vp), (zm, vm)) = (eval(xp), eval(xm));
            assert!(((vp - vm) / (2.0 * h) - jet.dv[k]).abs() < 1e-8);
            let dz = f.projector() * ((zp - zm) * (0.5 / h));
            assert!((dz - jet.dz[k]).max_abs() < 1e-8, "{k}");
        }
    }

    #[test]
    fn residuals() {
        let r = asymptotic_residual::<f64, _>(&Saddle, [0.4, 0.7]).unwrap();
        assert!(r.pi11 < 1e-15 && r.pi22 < 1e-15 && r.pi_qdf < 1e-14);
        let r = asymptotic_residual(&SphereCap::default(), [0.1, 0.1]).unwrap();
        assert!(r.pi11 > 0.5 && r.pi22 > 0.5 && r.pi_qdf > 0.0);
    }
}
