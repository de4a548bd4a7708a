use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;
use crate::jet::Jet;
use crate::linalg3::Vec3;
use crate::scalar::Real;
use crate::surface::{Chart, Cone, Cylinder, PointFrame};

use super::geodesic::{flat_direction, geodesic_flow, DEFAULT_STEPS};

/// Geometry at a point of a principal net `(x₁, x₂)`, where `∂x₁ = X` is the flat direction and
/// `∂x₂ = ηY` with `Y = QX = X × ν`.
#[derive(Clone, Copy, Debug)]
pub struct NetPoint<T> {
    pub net: [T; 2],
    pub frame: PointFrame<T>,
    pub x: Vec3<T>,
    pub y: Vec3<T>,
    /// `λ = Π(Y, Y)`.
    pub lambda: Jet<T>,
    /// `ϱ = ⟨D_Y X, Y⟩`.
    pub varrho: Jet<T>,
    pub eta: Jet<T>,
    pub varpi: Jet<T>,
}

/// A principal coordinate net on a parabolic patch, `|x₁| ≤ a`, `|x₂| ≤ ε`.
pub trait NetGeometry<T: Real>: Send + Sync {
    fn chart(&self) -> &dyn Chart<T>;
    fn half_length(&self) -> T;
    fn half_width(&self) -> T;
    fn chart_coords(&self, x: [T; 2]) -> Result<[T; 2]>;
    fn point(&self, x: [T; 2]) -> Result<NetPoint<T>>;
}

fn xy_at<T: Real>(frame: &PointFrame<T>, reference: Option<&Vec3<T>>) -> Result<(Vec3<T>, Vec3<T>)> {
    let mut x = flat_direction(frame)?;
    if let Some(r) = reference {
        if x.dot(r) < T::zero() {
            x = -x;
        }
    }
    Ok((x, x.cross(&frame.normal)))
}

/// Closed-form net on the unit cylinder around chart point `p0`: net `(x₁, x₂)` is chart
/// `(p0₁ + x₁, p0₂ − x₂)`; `λ = η = ϖ = 1`, `ϱ = 0`.
#[derive(Clone, Copy, Debug)]
pub struct CylinderNet<T> {
    pub p0: [T; 2],
    pub a: T,
    pub epsilon: T,
}

impl<T: Real> NetGeometry<T> for CylinderNet<T> {
    fn chart(&self) -> &dyn Chart<T> {
        &Cylinder
    }
    fn half_length(&self) -> T {
        self.a
    }
    fn half_width(&self) -> T {
        self.epsilon
    }
    fn chart_coords(&self, x: [T; 2]) -> Result<[T; 2]> {
        let c = [self.p0[0] + x[0], self.p0[1] - x[1]];
        Cylinder.check_domain(c)?;
        Ok(c)
    }
    fn point(&self, x: [T; 2]) -> Result<NetPoint<T>> {
        let frame = PointFrame::at(&Cylinder, self.chart_coords(x)?)?;
        let (xv, yv) = xy_at(&frame, None)?;
        let one = Jet::constant(T::one());
        Ok(NetPoint {
            net: x,
            frame,
            x: xv,
            y: yv,
            lambda: one,
            varrho: Jet::constant(T::zero()),
            eta: one,
            varpi: one,
        })
    }
}

/// Closed-form net on [`Cone`] around `(ρ₀, θ₀)`: chart `(ρ₀ + x₁/√2, θ₀ − x₂/ρ₀)`,
/// `λ = −1/(√2ρ)`, `ϱ = 1/(√2ρ)`, `η = ϖ = ρ/ρ₀`.
#[derive(Clone, Copy, Debug)]
pub struct ConeNet<T> {
    pub p0: [T; 2],
    pub a: T,
    pub epsilon: T,
}

impl<T: Real> NetGeometry<T> for ConeNet<T> {
    fn chart(&self) -> &dyn Chart<T> {
        &Cone
    }
    fn half_length(&self) -> T {
        self.a
    }
    fn half_width(&self) -> T {
        self.epsilon
    }
    fn chart_coords(&self, x: [T; 2]) -> Result<[T; 2]> {
        let c = [self.p0[0] + x[0] * T::FRAC_1_SQRT_2(), self.p0[1] - x[1] / self.p0[0]];
        Cone.check_domain(c)?;
        Ok(c)
    }
    fn point(&self, x: [T; 2]) -> Result<NetPoint<T>> {
        let c = self.chart_coords(x)?;
        let frame = PointFrame::at(&Cone, c)?;
        let (xv, yv) = xy_at(&frame, None)?;
        let s = T::FRAC_1_SQRT_2();
        let rho = Jet::constant(c[0]) + Jet::variable(0, T::zero()) * s;
        let inv = rho.recip();
        Ok(NetPoint {
            net: x,
            frame,
            x: xv,
            y: yv,
            lambda: inv * (-s),
            varrho: inv * s,
            eta: rho * (T::one() / self.p0[0]),
            varpi: rho * (T::one() / self.p0[0]),
        })
    }
}

/// Principal net built numerically: `ψ⁻¹(x₁, x₂) = γ(x₁, β(x₂, p₀))` with `γ` the flat-direction
/// geodesic and `β` the unit-speed flow of `Y` through `p₀`. `ϱ` comes from finite differences of
/// the flat-direction field, `η` from Simpson integration of `ϱ` along `γ`; field jets are finite
/// differences in net coordinates.
pub struct PrincipalNet<T> {
    chart: Arc<dyn Chart<T>>,
    p0: [T; 2],
    x0: Vec3<T>,
    a: T,
    epsilon: T,
    steps: usize,
    fd_step: T,
    jet_step: T,
}

struct NetSample<T> {
    coords: [T; 2],
    x: Vec3<T>,
}

impl<T: Real> PrincipalNet<T> {
    pub fn build(chart: Arc<dyn Chart<T>>, p0: [T; 2], a: T, epsilon: T) -> Result<Self> {
        Self::with_steps(chart, p0, a, epsilon, DEFAULT_STEPS)
    }

    pub fn with_steps(chart: Arc<dyn Chart<T>>, p0: [T; 2], a: T, epsilon: T, steps: usize) -> Result<Self> {
        let frame = PointFrame::at(chart.as_ref(), p0)?;
        let x0 = flat_direction(&frame)?;
        let size = chart.domain().size();
        let net = PrincipalNet {
            chart,
            p0,
            x0,
            a,
            epsilon,
            steps: steps + steps % 2,
            fd_step: T::lit(1e-4) * size,
            jet_step: T::lit(1e-2) * a.min(epsilon),
        };
        for s in [-epsilon, epsilon] {
            let b = net.transversal(s)?;
            for t in [-a, a] {
                let g = geodesic_flow(net.chart.as_ref(), b.coords, &b.x, t, net.steps)?;
                if g.exited {
                    return Err(Error::DomainExit { achieved: g.achieved().as_f64(), requested: t.as_f64() });
                }
            }
        }
        Ok(net)
    }

    fn x_field(&self, c: [T; 2], reference: &Vec3<T>) -> Result<(PointFrame<T>, Vec3<T>, Vec3<T>)> {
        let frame = PointFrame::at(self.chart.as_ref(), c)?;
        let (x, y) = xy_at(&frame, Some(reference))?;
        Ok((frame, x, y))
    }

    /// `β(s, p₀)`: RK4 on `ċ = Y(c)` in chart coordinates.
    fn transversal(&self, s: T) -> Result<NetSample<T>> {
        let n = self.steps;
        let h = s / T::lit(n as f64);
        let mut c = self.p0;
        let mut xref = self.x0;
        let rhs = |c: [T; 2], xref: &Vec3<T>| -> Result<[T; 2]> {
            let (frame, _, y) = self.x_field(c, xref)?;
            Ok(frame.components(&y))
        };
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        for _ in 0..n {
            let k1 = rhs(c, &xref)?;
            let k2 = rhs([c[0] + half * h * k1[0], c[1] + half * h * k1[1]], &xref)?;
            let k3 = rhs([c[0] + half * h * k2[0], c[1] + half * h * k2[1]], &xref)?;
            let k4 = rhs([c[0] + h * k3[0], c[1] + h * k3[1]], &xref)?;
            for i in 0..2 {
                c[i] += h / T::lit(6.0) * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
            }
            xref = self.x_field(c, &xref).map_err(|_| Error::DomainExit {
                achieved: f64::NAN,
                requested: s.as_f64(),
            })?
            .1;
        }
        Ok(NetSample { coords: c, x: xref })
    }

    /// `ϱ = ⟨D_Y X, Y⟩` at chart point `c`.
    pub fn varrho_at(&self, c: [T; 2], reference: &Vec3<T>) -> Result<T> {
        let (frame, x, y) = self.x_field(c, reference)?;
        let comps = frame.components(&y);
        let mut dyx = Vec3::zero();
        for (i, yi) in comps.iter().enumerate() {
            let (a, b) = if i == 0 { (1, 0) } else { (0, 1) };
            let field = |p: [T; 2]| -> Vec3<T> {
                self.x_field(p, &x).map(|(_, xv, _)| xv).unwrap_or_else(|_| Vec3::new(T::nan(), T::nan(), T::nan()))
            };
            let d: Vec3<T> = fd::partial(&field, c, a, b, self.fd_step);
            dyx += d * *yi;
        }
        let v = dyx.dot(&y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::OutOfDomain { chart: self.chart.name().to_string(), x1: c[0].as_f64(), x2: c[1].as_f64() })
        }
    }

    /// Chart coordinates, frame vectors and `η` at net point `x`.
    fn walk(&self, x: [T; 2]) -> Result<(NetSample<T>, T)> {
        let b = self.transversal(x[1])?;
        let g = geodesic_flow(self.chart.as_ref(), b.coords, &b.x, x[0], self.steps)?.complete()?;
        let n = g.params.len() - 1;
        let h = x[0] / T::lit(n as f64);
        let sign = if x[0] < T::zero() { -T::one() } else { T::one() };
        let mut acc = T::zero();
        for (k, (c, t)) in g.coords.iter().zip(g.tangents.iter().map(|t| *t * sign)).enumerate() {
            let w = if k == 0 || k == n {
                T::one()
            } else if k % 2 == 1 {
                T::lit(4.0)
            } else {
                T::lit(2.0)
            };
            acc += w * self.varrho_at(*c, &t)?;
        }
        let eta = (acc * h / T::lit(3.0)).exp();
        let end = NetSample { coords: g.end_coords(), x: (g.tangents[n] * sign).normalized() };
        Ok((end, eta))
    }

    pub fn eta(&self, x: [T; 2]) -> Result<T> {
        self.walk(x).map(|(_, e)| e)
    }

    /// `|∂x₂ ψ⁻¹|` from finite differences of net points, to compare against `η`.
    pub fn transversal_speed(&self, x: [T; 2]) -> Result<T> {
        let h = self.jet_step;
        let pos = |p: [T; 2]| -> Vec3<T> {
            self.chart_coords(p)
                .map(|c| self.chart.position(c))
                .unwrap_or_else(|_| Vec3::new(T::nan(), T::nan(), T::nan()))
        };
        let d: Vec3<T> = fd::partial(&pos, x, 0, 1, h);
        Ok(d.norm())
    }

    /// `β(s, γ(t, p₀))`: flow of `ηY` from the point at net `(t, 0)`, for comparison with
    /// `γ(t, β(s, p₀))`.
    pub fn transversal_flow(&self, t: T, s: T, steps: usize) -> Result<[T; 2]> {
        let (start, _) = self.walk([t, T::zero()])?;
        let mut c = start.coords;
        let mut xref = start.x;
        let h = s / T::lit(steps as f64);
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let rhs = |c: [T; 2], sigma: T, xref: &Vec3<T>| -> Result<[T; 2]> {
            let (frame, _, y) = self.x_field(c, xref)?;
            let eta = self.eta([t, sigma])?;
            let comps = frame.components(&y);
            Ok([comps[0] * eta, comps[1] * eta])
        };
        for n in 0..steps {
            let sg = h * T::lit(n as f64);
            let k1 = rhs(c, sg, &xref)?;
            let k2 = rhs([c[0] + half * h * k1[0], c[1] + half * h * k1[1]], sg + half * h, &xref)?;
            let k3 = rhs([c[0] + half * h * k2[0], c[1] + half * h * k2[1]], sg + half * h, &xref)?;
            let k4 = rhs([c[0] + h * k3[0], c[1] + h * k3[1]], sg + h, &xref)?;
            for i in 0..2 {
                c[i] += h / T::lit(6.0) * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
            }
            xref = self.x_field(c, &xref)?.1;
        }
        Ok(c)
    }

    fn scalar_fields(&self, x: [T; 2]) -> Result<[T; 3]> {
        let (s, eta) = self.walk(x)?;
        let (frame, _, y) = self.x_field(s.coords, &s.x)?;
        let lambda = frame.second_form_at(&y, &y);
        let varrho = self.varrho_at(s.coords, &s.x)?;
        Ok([lambda, varrho, eta])
    }
}

impl<T: Real> NetGeometry<T> for PrincipalNet<T> {
    fn chart(&self) -> &dyn Chart<T> {
        self.chart.as_ref()
    }
    fn half_length(&self) -> T {
        self.a
    }
    fn half_width(&self) -> T {
        self.epsilon
    }
    fn chart_coords(&self, x: [T; 2]) -> Result<[T; 2]> {
        self.walk(x).map(|(s, _)| s.coords)
    }
    fn point(&self, x: [T; 2]) -> Result<NetPoint<T>> {
        let (s, _) = self.walk(x)?;
        let (frame, xv, yv) = self.x_field(s.coords, &s.x)?;
        let h = self.jet_step;
        let jet = |k: usize| -> Jet<T> {
            let f = |p: [T; 2]| self.scalar_fields(p).map(|v| v[k]).unwrap_or(T::nan());
            fd::scalar_jet(&f, x, h)
        };
        let eta = jet(2);
        Ok(NetPoint { net: x, frame, x: xv, y: yv, lambda: jet(0), varrho: jet(1), eta, varpi: eta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Plane;

    #[test]
    fn cylinder_net_is_trivial() {
        let net = CylinderNet { p0: [0.2f64, 0.5], a: 0.8, epsilon: 0.5 };
        let p = net.point([0.3, -0.2]).unwrap();
        assert_eq!(net.chart_coords([0.3, -0.2]).unwrap(), [0.5, 0.7]);
        assert!((p.x - Vec3::new(0.0, 0.0, 1.0)).max_abs() < 1e-15);
        assert!((p.lambda.value() - 1.0).abs() < 1e-15);
        assert!((p.frame.second_form_at(&p.y, &p.y) - 1.0).abs() < 1e-14);
        let r = |x: [f64; 2]| Cylinder.position(net.chart_coords(x).unwrap());
        let d2 = (r([0.3, -0.2 + 1e-6]) - r([0.3, -0.2 - 1e-6])) * 5e5;
        assert!((d2 - p.y).max_abs() < 1e-9);
    }

    #[test]
    fn cone_net_closed_form_consistency() {
        let net = ConeNet { p0: [1.0f64, 0.0], a: 0.5, epsilon: 0.5 };
        let x = [0.3, 0.2];
        let p = net.point(x).unwrap();
        assert!((p.frame.shape_ambient * p.x).norm() < 1e-12);
        assert!((p.frame.second_form_at(&p.y, &p.y) - p.lambda.value()).abs() < 1e-12);
        let r = |x: [f64; 2]| Cone.position(net.chart_coords(x).unwrap());
        let h = 1e-6;
        let d1 = (r([x[0] + h, x[1]]) - r([x[0] - h, x[1]])) * (0.5 / h);
        let d2 = (r([x[0], x[1] + h]) - r([x[0], x[1] - h])) * (0.5 / h);
        assert!((d1 - p.x).max_abs() < 1e-9);
        assert!((d2 - p.y * p.eta.value()).max_abs() < 1e-9);
        assert!((p.lambda.partial(1, 0) + p.varrho.value() * p.lambda.value()).abs() < 1e-12);
    }

    #[test]
    fn numeric_net_on_cylinder() {
        let net = PrincipalNet::<f64>::with_steps(Arc::new(Cylinder), [0.1, 0.2], 0.5, 0.4, 200).unwrap();
        let exact = CylinderNet { p0: [0.1f64, 0.2], a: 0.5, epsilon: 0.4 };
        for x in [[0.3, 0.1], [-0.4, -0.3]] {
            let (c, e) = (net.chart_coords(x).unwrap(), exact.chart_coords(x).unwrap());
            assert!((c[0] - e[0]).abs() < 1e-10 && (c[1] - e[1]).abs() < 1e-10);
            assert!((net.eta(x).unwrap() - 1.0).abs() < 1e-8);
            assert!(net.varrho_at(c, &Vec3::unit(2)).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_net_on_cone_matches_closed_form() {
        let net = PrincipalNet::<f64>::with_steps(Arc::new(Cone), [1.0, 0.0], 0.5, 0.4, 200).unwrap();
        let exact = ConeNet { p0: [1.0f64, 0.0], a: 0.5, epsilon: 0.4 };
        for x in [[0.35, -0.25], [-0.3, 0.2]] {
            let (c, e) = (net.chart_coords(x).unwrap(), exact.chart_coords(x).unwrap());
            assert!((c[0] - e[0]).abs() < 1e-9 && (c[1] - e[1]).abs() < 1e-9, "{c:?} {e:?}");
            let pe = exact.point(x).unwrap();
            assert!((net.eta(x).unwrap() - pe.eta.value()).abs() < 1e-8);
            assert!((net.transversal_speed(x).unwrap() - pe.eta.value()).abs() < 1e-8);
            let s = net.walk(x).unwrap().0;
            assert!((s.x - pe.x).max_abs() < 1e-9);
            assert!((net.varrho_at(s.coords, &s.x).unwrap() - pe.varrho.value()).abs() < 1e-8);
        }
    }

    #[test]
    fn plane_is_rejected() {
        assert!(matches!(
            PrincipalNet::<f64>::build(Arc::new(Plane), [0.0, 0.0], 0.5, 0.5),
            Err(Error::FlatPoint(_))
        ));
    }

    #[test]
    fn domain_exit_reported() {
        assert!(matches!(
            PrincipalNet::<f64>::with_steps(Arc::new(Cylinder), [1.8, 0.0], 0.5, 0.2, 50),
            Err(Error::DomainExit { .. })
        ));
    }
}
