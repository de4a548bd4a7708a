//! Small fixed-size linear algebra: 3-vectors, 3×3 matrices, a Jacobi symmetric eigensolver,
//! polar decomposition and the strain measures used by the rigidity energies.
//!
//! Two routes to the stretch strain `T(A) = (AᵀA)^{1/2} − I` are provided. [`strain_t`] goes
//! through the polar factors of `A` and is the reference route. [`strain_from_displacement`]
//! works from `B = A − I` through the eigenpairs of `Φ(B) = sym B + ½BᵀB` and never forms
//! `1 + small − 1`, so it keeps full relative accuracy when `|B|` is far below machine epsilon.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Vec3<T>(pub [T; 3]);

/// Row-major 3×3 matrix. Used in the Jacobian convention: `A·v` is the derivative along `v`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([T::zero(); 3])
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = T::one();
        v
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        *self * (T::one() / self.norm())
    }

    pub fn outer(&self, o: &Self) -> Mat3<T> {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i] * o.0[j];
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Vec3([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }
}

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let mut m = Self::zero();
        m.0[0][0] = a;
        m.0[1][1] = b;
        m.0[2][2] = c;
        m
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][0] = c0.0[i];
            m.0[i][1] = c1.0[i];
            m.0[i][2] = c2.0[i];
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `det(I + self)` expanded by invariants, so a tiny `self` does not lose digits.
    pub fn det_identity_plus(&self) -> T {
        let m = &self.0;
        let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
            - m[1][2] * m[2][1];
        T::one() + self.trace() + minors + self.det()
    }

    pub fn inverse(&self) -> Option<Self> {
        let m = &self.0;
        let det = self.det();
        let scale = self.frobenius().powi(3);
        if det == T::zero() || det.abs() <= T::epsilon() * scale {
            return None;
        }
        let inv_det = T::one() / det;
        let mut r = Self::zero();
        r.0[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
        r.0[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
        r.0[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
        r.0[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
        r.0[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
        r.0[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
        r.0[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
        r.0[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
        r.0[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
        Some(r)
    }

    /// Frobenius inner product `tr(AᵀB)`.
    pub fn ddot(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    pub fn frobenius_sq(&self) -> T {
        self.ddot(self)
    }

    /// `|A| = sqrt(tr AᵀA)`.
    pub fn frobenius(&self) -> T {
        self.frobenius_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Rodrigues rotation about `axis` (need not be normalized) by `angle` radians.
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let k = axis.normalized();
        let (s, c) = angle.sin_cos();
        let kx = Mat3([
            [T::zero(), -k.0[2], k.0[1]],
            [k.0[2], T::zero(), -k.0[0]],
            [-k.0[1], k.0[0], T::zero()],
        ]);
        Self::identity() + kx * s + (kx * kx) * (T::one() - c)
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.map(|x| x * s)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real> AddAssign for Mat3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Mul<T> for Mat3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        let mut m = self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s += self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

/// Symmetric part `(A + Aᵀ)/2`.
pub fn sym<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    (*a + a.transpose()) * T::lit(0.5)
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order, eigenvectors as columns.
#[derive(Clone, Copy, Debug)]
pub struct SymEigen<T> {
    pub values: [T; 3],
    pub vectors: Mat3<T>,
}

impl<T: Real> SymEigen<T> {
    /// Rebuilds `V diag(f(μ)) Vᵀ`.
    pub fn compose(&self, f: impl Fn(T) -> T) -> Mat3<T> {
        let mut m = Mat3::zero();
        for k in 0..3 {
            let v = self.vectors.col(k);
            m += v.outer(&v) * f(self.values[k]);
        }
        m
    }
}

/// Cyclic Jacobi iteration on a symmetric matrix. Stops once the off-diagonal Frobenius norm
/// falls below `Real::tiny()` times the matrix norm.
pub fn sym_eigen<T: Real>(a: &Mat3<T>) -> SymEigen<T> {
    let mut m = sym(a);
    let mut v = Mat3::identity();
    let scale = m.frobenius();
    let two = T::lit(2.0);
    if scale > T::zero() {
        for _sweep in 0..64 {
            let off = (two * (m.0[0][1].powi(2) + m.0[0][2].powi(2) + m.0[1][2].powi(2))).sqrt();
            if off <= T::tiny() * scale {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let apq = m.0[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m.0[q][q] - m.0[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let mkp = m.0[k][p];
                    let mkq = m.0[k][q];
                    m.0[k][p] = c * mkp - s * mkq;
                    m.0[k][q] = s * mkp + c * mkq;
                }
                for k in 0..3 {
                    let mpk = m.0[p][k];
                    let mqk = m.0[q][k];
                    m.0[p][k] = c * mpk - s * mqk;
                    m.0[q][k] = s * mpk + c * mqk;
                }
                for k in 0..3 {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = c * vkp - s * vkq;
                    v.0[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m.0[j][j].partial_cmp(&m.0[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = [m.0[order[0]][order[0]], m.0[order[1]][order[1]], m.0[order[2]][order[2]]];
    let vectors = Mat3::from_cols(v.col(order[0]), v.col(order[1]), v.col(order[2]));
    SymEigen { values, vectors }
}

#[derive(Clone, Copy, Debug)]
pub struct PolarFactors<T> {
    pub rotation: Mat3<T>,
    pub stretch: Mat3<T>,
    /// `det A > 0`; when false `rotation` is orthogonal with determinant −1.
    pub valid: bool,
    /// Smallest singular value below `1e-12` times the largest; `rotation` is then unreliable.
    pub degenerate: bool,
}

/// `A = R U` with `U = (AᵀA)^{1/2}` from the eigendecomposition of `AᵀA`.
pub fn polar_decompose<T: Real>(a: &Mat3<T>) -> PolarFactors<T> {
    let eig = sym_eigen(&(a.transpose() * *a));
    let sigma = eig.values.map(|mu| mu.max(T::zero()).sqrt());
    let degenerate = sigma[2] < T::lit(1e-12) * sigma[0] || sigma[0] == T::zero();
    let stretch = eig.compose(|mu| mu.max(T::zero()).sqrt());
    let rotation = if degenerate {
        Mat3::identity()
    } else {
        *a * eig.compose(|mu| T::one() / mu.sqrt())
    };
    PolarFactors { rotation, stretch, valid: a.det() > T::zero(), degenerate }
}

/// A value together with the orientation/degeneracy flags of the matrix it was computed from.
#[derive(Clone, Copy, Debug)]
pub struct Flagged<V> {
    pub value: V,
    pub orientation_reversing: bool,
    pub degenerate: bool,
}

/// `T(A) = (AᵀA)^{1/2} − I` via the polar factors.
pub fn strain_t<T: Real>(a: &Mat3<T>) -> Flagged<Mat3<T>> {
    let p = polar_decompose(a);
    Flagged { value: p.stretch - Mat3::identity(), orientation_reversing: !p.valid, degenerate: p.degenerate }
}

/// Distance from `A` to SO(3). For `det A > 0` this is `|T(A)|`; otherwise the nearest proper
/// rotation flips the smallest singular direction and the result is flagged.
pub fn dist_so3<T: Real>(a: &Mat3<T>) -> Flagged<T> {
    let eig = sym_eigen(&(a.transpose() * *a));
    let sigma = eig.values.map(|mu| mu.max(T::zero()).sqrt());
    let degenerate = sigma[2] < T::lit(1e-12) * sigma[0] || sigma[0] == T::zero();
    let reversing = a.det() <= T::zero();
    Flagged { value: singular_distance(sigma, reversing), orientation_reversing: reversing, degenerate }
}

fn singular_distance<T: Real>(sigma: [T; 3], reversing: bool) -> T {
    let one = T::one();
    let last = if reversing { sigma[2] + one } else { sigma[2] - one };
    ((sigma[0] - one).powi(2) + (sigma[1] - one).powi(2) + last.powi(2)).sqrt()
}

/// `Φ(B) = sym B + ½ BᵀB`.
pub fn nonlinear_strain_phi<T: Real>(b: &Mat3<T>) -> Mat3<T> {
    sym(b) + (b.transpose() * *b) * T::lit(0.5)
}

/// `T(I + B)` computed from `B` without cancellation: with `Φ(B) = Σ μ vvᵀ`,
/// `(AᵀA)^{1/2} − I = Σ 2μ / (1 + sqrt(1 + 2μ)) vvᵀ`.
pub fn strain_from_displacement<T: Real>(b: &Mat3<T>) -> Mat3<T> {
    sym_eigen(&nonlinear_strain_phi(b)).compose(stretch_minus_one)
}

#[inline]
fn stretch_minus_one<T: Real>(mu: T) -> T {
    let two = T::lit(2.0);
    let s = (T::one() + two * mu).max(T::zero()).sqrt();
    two * mu / (T::one() + s)
}

/// `dist(I + B, SO(3))` from `B`, accurate for arbitrarily small `B`.
pub fn dist_so3_perturbed<T: Real>(b: &Mat3<T>) -> Flagged<T> {
    let eig = sym_eigen(&nonlinear_strain_phi(b));
    let reversing = b.det_identity_plus() <= T::zero();
    let two = T::lit(2.0);
    let degenerate = T::one() + two * eig.values[2] <= T::lit(1e-24) * (T::one() + two * eig.values[0]);
    let value = if reversing {
        let sigma = eig.values.map(|mu| (T::one() + two * mu).max(T::zero()).sqrt());
        singular_distance(sigma, true)
    } else {
        eig.values.iter().map(|&mu| stretch_minus_one(mu).powi(2)).sum::<T>().sqrt()
    };
    Flagged { value, orientation_reversing: reversing, degenerate }
}

/// Two-sided comparison `|T(A)|/(2√3) ≤ |Φ(B)| ≤ ((√3 + |A|)/2)|T(A)|` with `A = I + B`.
/// Slack is `1e-12` relative to `|T(A)|`. Rejects `det A ≤ 0`.
pub fn sandwich_check<T: Real>(b: &Mat3<T>) -> Result<bool> {
    if b.det_identity_plus() <= T::zero() {
        return Err(Error::Precondition("sandwich check requires det(I + B) > 0".into()));
    }
    let (lower, phi, upper) = sandwich_terms(b);
    let slack = T::lit(1e-12) * lower.max(upper);
    Ok(lower <= phi + slack && phi <= upper + slack)
}

/// Returns `(|T|/(2√3), |Φ(B)|, ((√3 + |A|)/2)|T|)`.
pub fn sandwich_terms<T: Real>(b: &Mat3<T>) -> (T, T, T) {
    let t = strain_from_displacement(b).frobenius();
    let phi = nonlinear_strain_phi(b).frobenius();
    let sqrt3 = T::lit(3.0).sqrt();
    let a = (Mat3::identity() + *b).frobenius();
    (t / (T::lit(2.0) * sqrt3), phi, (sqrt3 + a) / T::lit(2.0) * t)
}

/// Nearest proper rotation to `I + B`, returned as `R − I` without cancellation:
/// `R − I = (B − T)(I + T)⁻¹` where `T = T(I + B)`.
pub fn rotation_offset<T: Real>(b: &Mat3<T>) -> Option<Mat3<T>> {
    let t = strain_from_displacement(b);
    let inv = (Mat3::identity() + t).inverse()?;
    Some((*b - t) * inv)
}
