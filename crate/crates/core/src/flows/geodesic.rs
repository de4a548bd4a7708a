use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg3::Vec3;
use crate::scalar::Real;
use crate::surface::{Chart, PointFrame, Sym2};

/// Default number of integrator steps per curve.
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Clone, Debug, Serialize)]
pub struct CurveTrace<T> {
    /// Signed arc-length parameters, uniform step.
    pub params: Vec<T>,
    pub points: Vec<Vec3<T>>,
    pub coords: Vec<[T; 2]>,
    /// Unit ambient tangents `dγ/dt`.
    pub tangents: Vec<Vec3<T>>,
    /// True when the curve left the chart domain before reaching the requested length.
    pub exited: bool,
    pub requested: T,
}

impl<T: Real> CurveTrace<T> {
    pub fn achieved(&self) -> T {
        *self.params.last().expect("trace has at least one sample")
    }

    pub fn end_coords(&self) -> [T; 2] {
        *self.coords.last().expect("trace has at least one sample")
    }

    /// Errors with [`Error::DomainExit`] when the curve was truncated.
    pub fn complete(self) -> Result<Self> {
        if self.exited {
            Err(Error::DomainExit { achieved: self.achieved().as_f64(), requested: self.requested.as_f64() })
        } else {
            Ok(self)
        }
    }
}

fn christoffel_at<T: Real, C: Chart<T> + ?Sized>(chart: &C, x: [T; 2]) -> Option<[Sym2<T>; 2]> {
    if !chart.domain().contains(x) {
        return None;
    }
    PointFrame::at(chart, x).ok().map(|f| f.christoffel)
}

fn accel<T: Real>(gamma: &[Sym2<T>; 2], u: [T; 2]) -> [T; 2] {
    let mut a = [T::zero(); 2];
    for (k, ak) in a.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                *ak -= gamma[k][i][j] * u[i] * u[j];
            }
        }
    }
    a
}

/// Geodesic `ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0` from `x0` with initial unit tangent `dir`, integrated by
/// classical RK4 over `steps` equal steps. Negative `length` runs backwards along `dir`.
pub fn geodesic_flow<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x0: [T; 2],
    dir: &Vec3<T>,
    length: T,
    steps: usize,
) -> Result<CurveTrace<T>> {
    let f0 = PointFrame::at(chart, x0)?;
    let d = f0.projector() * *dir;
    let nd = d.norm();
    if !(nd > T::zero()) {
        return Err(Error::Degenerate("geodesic direction has no tangential part".into()));
    }
    let d = d * (T::one() / nd);
    let steps = steps.max(1);
    let hstep = length / T::lit(steps as f64);
    let mut trace = CurveTrace {
        params: vec![T::zero()],
        points: vec![f0.position],
        coords: vec![x0],
        tangents: vec![d * length.signum()],
        exited: false,
        requested: length,
    };
    let mut x = x0;
    let mut u = f0.components(&d);
    if length < T::zero() {
        u = [-u[0], -u[1]];
    }
    let h = hstep.abs();
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    for n in 1..=steps {
        let stage = |x: [T; 2], u: [T; 2]| christoffel_at(chart, x).map(|g| (u, accel(&g, u)));
        let shift = |x: [T; 2], d: [T; 2], s: T| [x[0] + d[0] * s, x[1] + d[1] * s];
        let Some((k1x, k1u)) = stage(x, u) else {
            trace.exited = true;
            break;
        };
        let Some((k2x, k2u)) = stage(shift(x, k1x, half * h), shift(u, k1u, half * h)) else {
            trace.exited = true;
            break;
        };
        let Some((k3x, k3u)) = stage(shift(x, k2x, half * h), shift(u, k2u, half * h)) else {
            trace.exited = true;
            break;
        };
        let Some((k4x, k4u)) = stage(shift(x, k3x, h), shift(u, k3u, h)) else {
            trace.exited = true;
            break;
        };
        let nx = [
            x[0] + h * sixth * (k1x[0] + (k2x[0] + k3x[0]) * T::lit(2.0) + k4x[0]),
            x[1] + h * sixth * (k1x[1] + (k2x[1] + k3x[1]) * T::lit(2.0) + k4x[1]),
        ];
        let nu = [
            u[0] + h * sixth * (k1u[0] + (k2u[0] + k3u[0]) * T::lit(2.0) + k4u[0]),
            u[1] + h * sixth * (k1u[1] + (k2u[1] + k3u[1]) * T::lit(2.0) + k4u[1]),
        ];
        if !chart.domain().contains(nx) {
            trace.exited = true;
            break;
        }
        x = nx;
        u = nu;
        let jet = chart.jet(x);
        let tangent = jet.d1[0] * u[0] + jet.d1[1] * u[1];
        trace.params.push(hstep * T::lit(n as f64));
        trace.points.push(jet.r);
        trace.coords.push(x);
        trace.tangents.push(tangent);
    }
    Ok(trace)
}

/// Unit vector spanning the kernel of the shape operator at a parabolic point, oriented so that
/// `⟨e, ∂₁r⟩ > 0` (or `⟨e, ∂₂r⟩ > 0` when that vanishes).
pub fn flat_direction<T: Real>(frame: &PointFrame<T>) -> Result<Vec3<T>> {
    let [l1, l2] = frame.curvatures;
    let pi = l1.hypot(l2);
    if !(pi > T::lit(1e-12)) {
        return Err(Error::FlatPoint(format!("|Π| = {:e}", pi.as_f64())));
    }
    if frame.gauss.abs() > T::lit(1e-6) * pi * pi {
        return Err(Error::WrongGeometry(format!(
            "flat direction needs κ = 0, got κ = {:e}",
            frame.gauss.as_f64()
        )));
    }
    let e = if l1.abs() < l2.abs() { frame.directions[0] } else { frame.directions[1] };
    Ok(orient(e, frame))
}

fn orient<T: Real>(e: Vec3<T>, frame: &PointFrame<T>) -> Vec3<T> {
    let t1 = frame.tangents[0].normalized();
    let s = e.dot(&t1);
    let s = if s.abs() > T::lit(1e-10) { s } else { e.dot(&frame.tangents[1]) };
    if s < T::zero() {
        -e
    } else {
        e
    }
}

/// Maximum distance of the samples from the chord through the endpoints, over the trace length.
pub fn straightness_deviation<T: Real>(trace: &CurveTrace<T>) -> T {
    let n = trace.points.len();
    if n < 3 {
        return T::zero();
    }
    let (a, b) = (trace.points[0], trace.points[n - 1]);
    let len = (trace.params[n - 1] - trace.params[0]).abs();
    let chord = b - a;
    let cl = chord.norm();
    let mut worst = T::zero();
    for p in &trace.points {
        let d = *p - a;
        let dist = if cl > T::zero() { d.cross(&chord).norm() / cl } else { d.norm() };
        worst = worst.max(dist);
    }
    if len > T::zero() {
        worst / len
    } else {
        worst
    }
}

/// `max_k |∇_{γ̇} ν|` over the samples of a trace.
pub fn normal_variation<T: Real, C: Chart<T> + ?Sized>(chart: &C, trace: &CurveTrace<T>) -> Result<T> {
    let mut worst = T::zero();
    for (x, t) in trace.coords.iter().zip(&trace.tangents) {
        let f = PointFrame::at(chart, *x)?;
        worst = worst.max((f.shape_ambient * *t).norm());
    }
    Ok(worst)
}

/// Geodesic along the flat direction at `x0`, checked for the parabolic precondition.
pub fn flat_geodesic<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x0: [T; 2],
    length: T,
    steps: usize,
) -> Result<CurveTrace<T>> {
    let f = PointFrame::at(chart, x0)?;
    let e = flat_direction(&f)?;
    geodesic_flow(chart, x0, &e, length, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Cone, Cylinder, Domain, Plane, Reparametrized, Saddle, SphereCap};

    #[test]
    fn plane_geodesic_is_straight() {
        let t = geodesic_flow::<f64, _>(&Plane, [-0.5, -0.2], &Vec3::new(0.6, 0.8, 0.0), 1.0, 100).unwrap();
        assert!(!t.exited);
        assert!((t.end_coords()[0] - 0.1).abs() < 1e-14 && (t.end_coords()[1] - 0.6).abs() < 1e-14);
        assert!(straightness_deviation(&t) < 1e-15);
    }

    #[test]
    fn sphere_geodesic_is_great_circle() {
        let cap = SphereCap { radius: 0.95f64 };
        let x0 = [0.1, -0.2];
        let f = PointFrame::<f64>::at(&cap, x0).unwrap();
        let dir = (f.tangents[0] + f.tangents[1]).normalized();
        let t = geodesic_flow(&cap, x0, &dir, 1.0, DEFAULT_STEPS).unwrap();
        assert!(!t.exited);
        let n = f.position.cross(&dir);
        for p in &t.points {
            assert!((p.norm() - 1.0).abs() < 1e-10);
            assert!(p.dot(&n).abs() < 1e-10);
        }
        let angle = f.position.dot(&t.points[t.points.len() - 1]).acos();
        assert!((angle - 1.0).abs() < 1e-10);
        let sagitta = 1.0 - 0.5f64.cos();
        assert!((straightness_deviation(&t) - sagitta).abs() < 1e-6);
    }

    #[test]
    fn cylinder_axial_geodesic() {
        let t = flat_geodesic::<f64, _>(&Cylinder, [0.1, 0.4], 1.0, DEFAULT_STEPS).unwrap();
        let p0 = t.points[0];
        for (s, p) in t.params.iter().zip(&t.points) {
            assert!((*p - (p0 + Vec3::new(0.0, 0.0, *s))).max_abs() < 1e-10);
        }
        assert!(straightness_deviation(&t) < 1e-8);
        assert!(normal_variation(&Cylinder, &t).unwrap() < 1e-8);
    }

    #[test]
    fn domain_exit_truncates() {
        let t = geodesic_flow::<f64, _>(&Plane, [0.5, 0.0], &Vec3::unit(0), 1.0, 100).unwrap();
        assert!(t.exited);
        assert!(t.achieved() <= 0.5 + 1e-12 && t.achieved() > 0.45);
        assert!(matches!(t.complete(), Err(Error::DomainExit { .. })));
    }

    #[test]
    fn flat_directions() {
        let f = PointFrame::<f64>::at(&Cylinder, [0.0, 0.3]).unwrap();
        assert!((flat_direction(&f).unwrap() - Vec3::new(0.0, 0.0, 1.0)).max_abs() < 1e-15);
        let (s, c) = 0.5f64.sin_cos();
        let rotated = Reparametrized {
            inner: Cylinder,
            origin: [0.0, 0.0],
            matrix: [[c, -s], [s, c]],
            domain: Domain::Rect { lo: [-1.0, -1.0], hi: [1.0, 1.0] },
        };
        let f = PointFrame::<f64>::at(&rotated, [0.2, -0.1]).unwrap();
        assert!((flat_direction(&f).unwrap() - Vec3::new(0.0, 0.0, 1.0)).max_abs() < 1e-12);
        let x = [1.2f64, 0.3];
        let f = PointFrame::<f64>::at(&Cone, x).unwrap();
        let e = flat_direction(&f).unwrap();
        assert!((f.shape_ambient * e).norm() < 1e-10);
        let ruling = Vec3::new(x[1].cos(), x[1].sin(), 1.0).normalized();
        assert!((e - ruling).max_abs() < 1e-12);
    }

    #[test]
    fn flat_direction_errors() {
        let f = PointFrame::<f64>::at(&Plane, [0.0, 0.0]).unwrap();
        assert!(matches!(flat_direction(&f), Err(Error::FlatPoint(_))));
        let f = PointFrame::<f64>::at(&Saddle, [0.0, 0.0]).unwrap();
        assert!(matches!(flat_direction(&f), Err(Error::WrongGeometry(_))));
    }

    #[test]
    fn two_sample_trace_is_straight() {
        let t = CurveTrace {
            params: vec![0.0, 1.0],
            points: vec![Vec3::zero(), Vec3::unit(0)],
            coords: vec![[0.0; 2]; 2],
            tangents: vec![Vec3::unit(0); 2],
            exited: false,
            requested: 1.0,
        };
        assert_eq!(straightness_deviation(&t), 0.0);
    }
}
