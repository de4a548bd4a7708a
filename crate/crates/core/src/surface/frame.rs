use serde::Serialize;

use super::chart::{Chart, ChartJet};
use crate::error::{Error, Result};
use crate::linalg3::{Mat3, Vec3};
use crate::scalar::Real;

pub type Sym2<T> = [[T; 2]; 2];

/// Pointwise differential geometry of a chart.
///
/// Conventions: `ν = ∂₁r × ∂₂r / |∂₁r × ∂₂r|`, `Π_ij = ⟨∂_iν, ∂_jr⟩ = −⟨∂_i∂_jr, ν⟩`,
/// shape operator `S^i_j = g^{ik} Π_kj`, principal curvatures ordered `λ₁ ≥ λ₂`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PointFrame<T> {
    pub coords: [T; 2],
    pub position: Vec3<T>,
    pub tangents: [Vec3<T>; 2],
    /// Dual basis `r^i = g^{ij} ∂_jr`.
    pub dual: [Vec3<T>; 2],
    pub normal: Vec3<T>,
    pub metric: Sym2<T>,
    pub metric_inv: Sym2<T>,
    pub area_density: T,
    pub second_form: Sym2<T>,
    pub shape: Sym2<T>,
    /// `S̃ = ∇ν` as an ambient 3×3 matrix; annihilates ν.
    pub shape_ambient: Mat3<T>,
    pub gauss: T,
    pub mean: T,
    pub curvatures: [T; 2],
    pub directions: [Vec3<T>; 2],
    /// `christoffel[k][i][j] = Γ^k_ij`.
    pub christoffel: [Sym2<T>; 2],
}

pub fn inv2<T: Real>(m: &Sym2<T>) -> Option<(Sym2<T>, T)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == T::zero() || !det.is_finite() {
        return None;
    }
    let id = T::one() / det;
    Some(([[m[1][1] * id, -m[0][1] * id], [-m[1][0] * id, m[0][0] * id]], det))
}

pub fn mul2<T: Real>(a: &Sym2<T>, b: &Sym2<T>) -> Sym2<T> {
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

impl<T: Real> PointFrame<T> {
    pub fn at<C: Chart<T> + ?Sized>(chart: &C, x: [T; 2]) -> Result<Self> {
        chart.check_domain(x)?;
        Self::from_jet(chart.name(), x, &chart.jet(x))
    }

    pub fn from_jet(name: &str, x: [T; 2], jet: &ChartJet<T>) -> Result<Self> {
        let degenerate = || Error::DegenerateChart { chart: name.to_string(), x1: x[0].as_f64(), x2: x[1].as_f64() };
        let [r1, r2] = jet.d1;
        let cross = r1.cross(&r2);
        let cn = cross.norm();
        if !(cn > T::lit(1e-12) * r1.norm() * r2.norm()) {
            return Err(degenerate());
        }
        let nu = cross * (T::one() / cn);
        let g = [[r1.dot(&r1), r1.dot(&r2)], [r2.dot(&r1), r2.dot(&r2)]];
        let (gi, det) = inv2(&g).ok_or_else(degenerate)?;
        let dual = [r1 * gi[0][0] + r2 * gi[0][1], r1 * gi[1][0] + r2 * gi[1][1]];
        let mut pi = [[T::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                pi[i][j] = -jet.d2[i][j].dot(&nu);
            }
        }
        let s = mul2(&gi, &pi);
        // ∂_iν = S^k_i r_k, S̃ = Σ_i ∂_iν ⊗ r^i
        let dnu = [r1 * s[0][0] + r2 * s[1][0], r1 * s[0][1] + r2 * s[1][1]];
        let shape_ambient = dnu[0].outer(&dual[0]) + dnu[1].outer(&dual[1]);

        let e1 = r1.normalized();
        let e2 = nu.cross(&e1);
        let a = e1.dot(&(shape_ambient * e1));
        let c = e2.dot(&(shape_ambient * e2));
        let b = (e1.dot(&(shape_ambient * e2)) + e2.dot(&(shape_ambient * e1))) * T::lit(0.5);
        let half = T::lit(0.5);
        let mid = (a + c) * half;
        let rad = ((a - c) * half).hypot(b);
        let theta = (b + b).atan2(a - c) * half;
        let (sn, cs) = theta.sin_cos();
        let d1 = e1 * cs + e2 * sn;
        let d2 = nu.cross(&d1);

        let mut chr = [[[T::zero(); 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    chr[k][i][j] = jet.d2[i][j].dot(&dual[k]);
                }
            }
        }
        let gauss = (pi[0][0] * pi[1][1] - pi[0][1] * pi[1][0]) / det;
        Ok(PointFrame {
            coords: x,
            position: jet.r,
            tangents: [r1, r2],
            dual,
            normal: nu,
            metric: g,
            metric_inv: gi,
            area_density: det.sqrt(),
            second_form: pi,
            shape: s,
            shape_ambient,
            gauss,
            mean: s[0][0] + s[1][1],
            curvatures: [mid + rad, mid - rad],
            directions: [d1, d2],
            christoffel: chr,
        })
    }

    /// Tangent projector `I − ν⊗ν`.
    pub fn projector(&self) -> Mat3<T> {
        Mat3::identity() - self.normal.outer(&self.normal)
    }

    pub fn to_ambient(&self, comps: [T; 2]) -> Vec3<T> {
        self.tangents[0] * comps[0] + self.tangents[1] * comps[1]
    }

    /// Contravariant components `v^i = ⟨v, r^i⟩` of the tangential part of `v`.
    pub fn components(&self, v: &Vec3<T>) -> [T; 2] {
        [v.dot(&self.dual[0]), v.dot(&self.dual[1])]
    }

    /// Ambient matrix of a tangent endomorphism given by its mixed components `a^i_j`
    /// (`a ∂_j = a^i_j ∂_i`): `Σ a^i_j r_i ⊗ r^j`.
    pub fn lift_mixed(&self, a: &Sym2<T>) -> Mat3<T> {
        let mut m = Mat3::zero();
        for i in 0..2 {
            for j in 0..2 {
                m += self.tangents[i].outer(&self.dual[j]) * a[i][j];
            }
        }
        m
    }

    /// `Π(a, b)` for tangent vectors.
    pub fn second_form_at(&self, a: &Vec3<T>, b: &Vec3<T>) -> T {
        a.dot(&(self.shape_ambient * *b))
    }

    /// `(1 + tλ₁)(1 + tλ₂)`.
    pub fn volume_factor(&self, t: T) -> T {
        (T::one() + t * self.curvatures[0]) * (T::one() + t * self.curvatures[1])
    }
}

/// First partial derivatives along chart coordinates of the frame quantities; index `[k]` is `∂_k`.
#[derive(Clone, Copy, Debug)]
pub struct FrameDerivs<T> {
    pub metric: [Sym2<T>; 2],
    pub metric_inv: [Sym2<T>; 2],
    pub second_form: [Sym2<T>; 2],
    /// `shape[k][i][j] = ∂_k S^i_j`.
    pub shape: [Sym2<T>; 2],
    pub normal: [Vec3<T>; 2],
}

impl<T: Real> FrameDerivs<T> {
    pub fn new(frame: &PointFrame<T>, jet: &ChartJet<T>) -> Self {
        let z2 = [[T::zero(); 2]; 2];
        let mut out = FrameDerivs {
            metric: [z2; 2],
            metric_inv: [z2; 2],
            second_form: [z2; 2],
            shape: [z2; 2],
            normal: [Vec3::zero(); 2],
        };
        let gi = &frame.metric_inv;
        for k in 0..2 {
            let dnu = frame.shape_ambient * jet.d1[k];
            out.normal[k] = dnu;
            let mut dg = z2;
            let mut dpi = z2;
            for i in 0..2 {
                for j in 0..2 {
                    dg[i][j] = jet.d2[i][k].dot(&jet.d1[j]) + jet.d1[i].dot(&jet.d2[j][k]);
                    dpi[i][j] = -jet.d3[i][j][k].dot(&frame.normal) - jet.d2[i][j].dot(&dnu);
                }
            }
            let dgi = mul2(&mul2(gi, &dg), gi);
            let dgi = [[-dgi[0][0], -dgi[0][1]], [-dgi[1][0], -dgi[1][1]]];
            let a = mul2(&dgi, &frame.second_form);
            let b = mul2(gi, &dpi);
            for i in 0..2 {
                for j in 0..2 {
                    out.shape[k][i][j] = a[i][j] + b[i][j];
                }
            }
            out.metric[k] = dg;
            out.metric_inv[k] = dgi;
            out.second_form[k] = dpi;
        }
        out
    }
}
