use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::fd;
use crate::linalg3::Vec3;
use crate::scalar::Real;

/// Curvature class a chart is built to realize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryTag {
    /// κ < 0 and the coordinate lines are asymptotic (Π₁₁ = Π₂₂ = 0).
    HyperbolicAsymptotic,
    /// κ = 0, Π ≠ 0, coordinate lines along principal directions.
    ParabolicPrincipal,
    Elliptic,
    Generic,
}

impl fmt::Display for GeometryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryTag::HyperbolicAsymptotic => "hyperbolic-asymptotic",
            GeometryTag::ParabolicPrincipal => "parabolic-principal",
            GeometryTag::Elliptic => "elliptic",
            GeometryTag::Generic => "generic",
        })
    }
}

impl std::str::FromStr for GeometryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic-asymptotic" | "hyperbolic" => Ok(Self::HyperbolicAsymptotic),
            "parabolic-principal" | "parabolic" => Ok(Self::ParabolicPrincipal),
            "elliptic" => Ok(Self::Elliptic),
            "generic" => Ok(Self::Generic),
            other => Err(Error::Config(format!("unknown geometry tag `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain<T> {
    Rect { lo: [T; 2], hi: [T; 2] },
    Disk { center: [T; 2], radius: T },
}

impl<T: Real> Domain<T> {
    pub fn contains(&self, x: [T; 2]) -> bool {
        match *self {
            Domain::Rect { lo, hi } => (0..2).all(|i| x[i] >= lo[i] && x[i] <= hi[i]),
            Domain::Disk { center, radius } => {
                (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2) <= radius * radius
            }
        }
    }

    /// Largest side (rectangle) or diameter (disk).
    pub fn size(&self) -> T {
        match *self {
            Domain::Rect { lo, hi } => (hi[0] - lo[0]).max(hi[1] - lo[1]),
            Domain::Disk { radius, .. } => radius + radius,
        }
    }
}

/// Position and partial derivatives of a chart map up to third order. Mixed partials are stored
/// in every index order and are symmetric.
#[derive(Clone, Copy, Debug)]
pub struct ChartJet<T> {
    pub r: Vec3<T>,
    pub d1: [Vec3<T>; 2],
    pub d2: [[Vec3<T>; 2]; 2],
    pub d3: [[[Vec3<T>; 2]; 2]; 2],
}

impl<T: Real> ChartJet<T> {
    fn zeroed(r: Vec3<T>) -> Self {
        let z = Vec3::zero();
        ChartJet { r, d1: [z; 2], d2: [[z; 2]; 2], d3: [[[z; 2]; 2]; 2] }
    }
}

/// A parametric patch `r: (x₁, x₂) ↦ ℝ³`. The normal is always `∂₁r × ∂₂r` normalized.
pub trait Chart<T: Real>: Send + Sync {
    fn name(&self) -> &str;
    fn tag(&self) -> GeometryTag;
    fn domain(&self) -> Domain<T>;
    fn position(&self, x: [T; 2]) -> Vec3<T>;
    fn jet(&self, x: [T; 2]) -> ChartJet<T>;

    fn check_domain(&self, x: [T; 2]) -> Result<()> {
        if self.domain().contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { chart: self.name().to_string(), x1: x[0].as_f64(), x2: x[1].as_f64() })
        }
    }
}

/// `r = (x₁, x₂, −x₁x₂)` on `[−1, 1]²`. Both coordinate families are straight rulings, so the
/// chart is asymptotic everywhere; κ = −1/(1 + |x|²)².
#[derive(Clone, Copy, Debug, Default)]
pub struct Saddle;

impl<T: Real> Chart<T> for Saddle {
    fn name(&self) -> &str {
        "saddle"
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::HyperbolicAsymptotic
    }
    fn domain(&self) -> Domain<T> {
        Domain::Rect { lo: [-T::one(); 2], hi: [T::one(); 2] }
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        Vec3::new(x[0], x[1], -x[0] * x[1])
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let (o, z) = (T::one(), T::zero());
        let mut j = ChartJet::zeroed(<Self as Chart<T>>::position(self, x));
        j.d1 = [Vec3::new(o, z, -x[1]), Vec3::new(z, o, -x[0])];
        j.d2[0][1] = Vec3::new(z, z, -o);
        j.d2[1][0] = j.d2[0][1];
        j
    }
}

/// Unit cylinder `r = (cos x₂, −sin x₂, x₁)`: axial coordinate first, normal pointing outward.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cylinder;

impl<T: Real> Chart<T> for Cylinder {
    fn name(&self) -> &str {
        "cylinder"
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::ParabolicPrincipal
    }
    fn domain(&self) -> Domain<T> {
        Domain::Rect { lo: [-T::lit(2.0), -T::lit(3.0)], hi: [T::lit(2.0), T::lit(3.0)] }
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        let (s, c) = x[1].sin_cos();
        Vec3::new(c, -s, x[0])
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let (s, c) = x[1].sin_cos();
        let z = T::zero();
        let mut j = ChartJet::zeroed(Vec3::new(c, -s, x[0]));
        j.d1 = [Vec3::new(z, z, T::one()), Vec3::new(-s, -c, z)];
        j.d2[1][1] = Vec3::new(-c, s, z);
        j.d3[1][1][1] = Vec3::new(s, c, z);
        j
    }
}

/// Upper unit-sphere graph `r = (x₁, x₂, sqrt(1 − |x|²))` on a disk; normal points outward.
#[derive(Clone, Copy, Debug)]
pub struct SphereCap<T> {
    pub radius: T,
}

impl<T: Real> Default for SphereCap<T> {
    fn default() -> Self {
        SphereCap { radius: T::lit(0.6) }
    }
}

impl<T: Real> Chart<T> for SphereCap<T> {
    fn name(&self) -> &str {
        "sphere-cap"
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::Elliptic
    }
    fn domain(&self) -> Domain<T> {
        Domain::Disk { center: [T::zero(); 2], radius: self.radius }
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        Vec3::new(x[0], x[1], (T::one() - x[0] * x[0] - x[1] * x[1]).sqrt())
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let zc = (T::one() - x[0] * x[0] - x[1] * x[1]).sqrt();
        let (o, z0) = (T::one(), T::zero());
        let d = |i: usize, j: usize| if i == j { o } else { z0 };
        let z3 = zc.powi(3);
        let z5 = zc.powi(5);
        let mut j = ChartJet::zeroed(Vec3::new(x[0], x[1], zc));
        for i in 0..2 {
            let mut v = Vec3::zero();
            v.0[i] = o;
            v.0[2] = -x[i] / zc;
            j.d1[i] = v;
            for k in 0..2 {
                j.d2[i][k] = Vec3::new(z0, z0, -d(i, k) / zc - x[i] * x[k] / z3);
                for l in 0..2 {
                    let w = -(d(i, k) * x[l] + d(i, l) * x[k] + d(k, l) * x[i]) / z3
                        - T::lit(3.0) * x[i] * x[k] * x[l] / z5;
                    j.d3[i][k][l] = Vec3::new(z0, z0, w);
                }
            }
        }
        j
    }
}

/// The plane `r = (x₁, x₂, 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plane;

impl<T: Real> Chart<T> for Plane {
    fn name(&self) -> &str {
        "plane"
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::Generic
    }
    fn domain(&self) -> Domain<T> {
        Domain::Rect { lo: [-T::one(); 2], hi: [T::one(); 2] }
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        Vec3::new(x[0], x[1], T::zero())
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let mut j = ChartJet::zeroed(<Self as Chart<T>>::position(self, x));
        j.d1 = [Vec3::unit(0), Vec3::unit(1)];
        j
    }
}

/// Cone `z = sqrt(x² + y²)` as `r = (ρ cos θ, ρ sin θ, ρ)` with `ρ ∈ [0.5, 1.5]`, `θ ∈ [−1, 1]`.
/// The ρ-lines are the rulings.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cone;

impl<T: Real> Chart<T> for Cone {
    fn name(&self) -> &str {
        "cone"
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::ParabolicPrincipal
    }
    fn domain(&self) -> Domain<T> {
        Domain::Rect { lo: [T::lit(0.5), -T::one()], hi: [T::lit(1.5), T::one()] }
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        let (s, c) = x[1].sin_cos();
        Vec3::new(x[0] * c, x[0] * s, x[0])
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let (s, c) = x[1].sin_cos();
        let (rho, z) = (x[0], T::zero());
        let mut j = ChartJet::zeroed(<Self as Chart<T>>::position(self, x));
        j.d1 = [Vec3::new(c, s, T::one()), Vec3::new(-rho * s, rho * c, z)];
        j.d2[0][1] = Vec3::new(-s, c, z);
        j.d2[1][0] = j.d2[0][1];
        j.d2[1][1] = Vec3::new(-rho * c, -rho * s, z);
        j.d3[0][1][1] = Vec3::new(-c, -s, z);
        j.d3[1][0][1] = j.d3[0][1][1];
        j.d3[1][1][0] = j.d3[0][1][1];
        j.d3[1][1][1] = Vec3::new(rho * s, -rho * c, z);
        j
    }
}

/// Affine change of chart parameters `x = origin + M y`, used to check that geometric outputs do
/// not depend on the parametrization.
pub struct Reparametrized<T, C> {
    pub inner: C,
    pub origin: [T; 2],
    pub matrix: [[T; 2]; 2],
    pub domain: Domain<T>,
}

impl<T: Real, C: Chart<T>> Reparametrized<T, C> {
    fn map(&self, y: [T; 2]) -> [T; 2] {
        let m = &self.matrix;
        [self.origin[0] + m[0][0] * y[0] + m[0][1] * y[1], self.origin[1] + m[1][0] * y[0] + m[1][1] * y[1]]
    }
}

impl<T: Real, C: Chart<T>> Chart<T> for Reparametrized<T, C> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn tag(&self) -> GeometryTag {
        GeometryTag::Generic
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
    fn position(&self, y: [T; 2]) -> Vec3<T> {
        self.inner.position(self.map(y))
    }
    fn jet(&self, y: [T; 2]) -> ChartJet<T> {
        let inner = self.inner.jet(self.map(y));
        let m = &self.matrix;
        let mut j = ChartJet::zeroed(inner.r);
        for a in 0..2 {
            for i in 0..2 {
                j.d1[a] += inner.d1[i] * m[i][a];
            }
            for b in 0..2 {
                for i in 0..2 {
                    for k in 0..2 {
                        j.d2[a][b] += inner.d2[i][k] * (m[i][a] * m[k][b]);
                    }
                }
                for c in 0..2 {
                    for i in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                j.d3[a][b][c] += inner.d3[i][k][l] * (m[i][a] * m[k][b] * m[l][c]);
                            }
                        }
                    }
                }
            }
        }
        j
    }
}

type PositionFn<T> = dyn Fn([T; 2]) -> Vec3<T> + Send + Sync;

/// Chart whose derivatives come from 4th-order central differences of the position map.
/// First and second derivatives use step `1e-4·size`; third derivatives use `1e-2·size`, where
/// rounding would otherwise dominate.
pub struct FdChart<T> {
    name: String,
    tag: GeometryTag,
    domain: Domain<T>,
    map: Arc<PositionFn<T>>,
    step: T,
    step3: T,
}

impl<T: Real> FdChart<T> {
    pub fn new(
        name: impl Into<String>,
        tag: GeometryTag,
        domain: Domain<T>,
        map: impl Fn([T; 2]) -> Vec3<T> + Send + Sync + 'static,
    ) -> Self {
        let size = domain.size();
        FdChart {
            name: name.into(),
            tag,
            domain,
            map: Arc::new(map),
            step: T::lit(1e-4) * size,
            step3: T::lit(1e-2) * size,
        }
    }

    /// Wraps an analytic chart so that only its position map is used.
    pub fn from_chart<C: Chart<T> + Clone + 'static>(chart: C) -> Self {
        let name = format!("{}-fd", chart.name());
        let (tag, domain) = (chart.tag(), chart.domain());
        FdChart::new(name, tag, domain, move |x| chart.position(x))
    }
}

impl<T: Real> Chart<T> for FdChart<T> {
    fn name(&self) -> &str {
        &self.name
    }
    fn tag(&self) -> GeometryTag {
        self.tag
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
    fn position(&self, x: [T; 2]) -> Vec3<T> {
        (self.map)(x)
    }
    fn jet(&self, x: [T; 2]) -> ChartJet<T> {
        let (h, h3) = (self.step, self.step3);
        let f = |y: [T; 2]| (self.map)(y);
        let mut j = ChartJet::zeroed(self.position(x));
        for i in 0..2 {
            let (a, b) = if i == 0 { (1, 0) } else { (0, 1) };
            j.d1[i] = fd::partial(&f, x, a, b, h);
            j.d2[i][i] = fd::partial(&f, x, 2 * a, 2 * b, h);
            j.d3[i][i][i] = fd::partial(&f, x, 3 * a, 3 * b, h3);
        }
        let mixed = fd::partial(&f, x, 1, 1, h);
        j.d2[0][1] = mixed;
        j.d2[1][0] = mixed;
        let d112 = fd::partial(&f, x, 2, 1, h3);
        let d122 = fd::partial(&f, x, 1, 2, h3);
        for (a, b, c) in [(0, 0, 1), (0, 1, 0), (1, 0, 0)] {
            j.d3[a][b][c] = d112;
        }
        for (a, b, c) in [(0, 1, 1), (1, 0, 1), (1, 1, 0)] {
            j.d3[a][b][c] = d122;
        }
        j
    }
}

/// Polynomial map `r_k(x) = Σ c x₁^a x₂^b` per ambient component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolynomialMap {
    /// `(coefficient, a, b)` terms for each of the three components.
    pub terms: [Vec<(f64, u32, u32)>; 3],
}

impl PolynomialMap {
    pub fn eval<T: Real>(&self, x: [T; 2]) -> Vec3<T> {
        let mut out = Vec3::zero();
        for (k, terms) in self.terms.iter().enumerate() {
            for &(c, a, b) in terms {
                out.0[k] += T::lit(c) * x[0].powi(a as i32) * x[1].powi(b as i32);
            }
        }
        out
    }
}

/// Parses a polynomial chart description:
///
/// ```text
/// name   = hypar
/// tag    = hyperbolic-asymptotic
/// domain = -1 1 -1 1        # x1_lo x1_hi x2_lo x2_hi
/// x = 1 1 0                 # coefficient, exponent of x1, exponent of x2
/// y = 1 0 1
/// z = -1 1 1
/// ```
///
/// Repeated `x`/`y`/`z` keys accumulate terms.
pub fn polynomial_chart_from_config<T: Real>(text: &str) -> Result<FdChart<T>> {
    let kv = KeyValues::parse(text)?;
    let mut map = PolynomialMap::default();
    let mut name = "polynomial".to_string();
    let mut tag = GeometryTag::Generic;
    let mut domain = None;
    for (key, value) in kv.entries() {
        match key.as_str() {
            "name" => name = value.clone(),
            "tag" => tag = value.parse()?,
            "domain" => {
                let v = parse_floats(value, 4, key)?;
                domain = Some(Domain::Rect { lo: [T::lit(v[0]), T::lit(v[2])], hi: [T::lit(v[1]), T::lit(v[3])] });
            }
            "x" | "y" | "z" => {
                let v = parse_floats(value, 3, key)?;
                let comp = match key.as_str() {
                    "x" => 0,
                    "y" => 1,
                    _ => 2,
                };
                if v[1] < 0.0 || v[2] < 0.0 || v[1].fract() != 0.0 || v[2].fract() != 0.0 {
                    return Err(Error::Config(format!("exponents must be non-negative integers in `{value}`")));
                }
                map.terms[comp].push((v[0], v[1] as u32, v[2] as u32));
            }
            other => return Err(Error::Config(format!("unknown chart key `{other}`"))),
        }
    }
    let domain = domain.ok_or_else(|| Error::Config("chart needs a `domain` line".into()))?;
    Ok(FdChart::new(name, tag, domain, move |x| map.eval(x)))
}

fn parse_floats(value: &str, n: usize, key: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = value
        .split_whitespace()
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("`{key} = {value}`: {e}")))?;
    if v.len() != n {
        return Err(Error::Config(format!("`{key}` expects {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

/// Built-in charts by CLI name: `saddle`, `cylinder`, `sphere-cap`, `plane`, `cone`.
pub fn builtin_chart<T: Real>(name: &str) -> Option<Arc<dyn Chart<T>>> {
    match name {
        "saddle" => Some(Arc::new(Saddle)),
        "cylinder" => Some(Arc::new(Cylinder)),
        "sphere-cap" => Some(Arc::new(SphereCap::<T>::default())),
        "plane" => Some(Arc::new(Plane)),
        "cone" => Some(Arc::new(Cone)),
        _ => None,
    }
}

pub const BUILTIN_CHARTS: [&str; 5] = ["saddle", "cylinder", "sphere-cap", "plane", "cone"];

#[cfg(test)]
mod tests {
    use super::*;

    fn max_jet_gap<C: Chart<f64>, D: Chart<f64>>(a: &C, b: &D, x: [f64; 2]) -> [f64; 3] {
        let (ja, jb) = (a.jet(x), b.jet(x));
        let mut gap = [0.0f64; 3];
        for i in 0..2 {
            gap[0] = gap[0].max((ja.d1[i] - jb.d1[i]).max_abs());
            for k in 0..2 {
                gap[1] = gap[1].max((ja.d2[i][k] - jb.d2[i][k]).max_abs());
                for l in 0..2 {
                    gap[2] = gap[2].max((ja.d3[i][k][l] - jb.d3[i][k][l]).max_abs());
                }
            }
        }
        gap
    }

    #[test]
    fn closed_form_jets_match_finite_differences() {
        let pts = [[0.1, -0.2], [0.3, 0.25], [-0.35, 0.05]];
        for x in pts {
            let g = max_jet_gap(&Saddle, &FdChart::from_chart(Saddle), x);
            assert!(g[0] < 1e-9 && g[1] < 1e-6 && g[2] < 1e-6, "saddle {g:?}");
            let g = max_jet_gap(&Cylinder, &FdChart::from_chart(Cylinder), x);
            assert!(g[0] < 1e-9 && g[1] < 1e-6 && g[2] < 1e-5, "cylinder {g:?}");
            let g = max_jet_gap(&SphereCap::default(), &FdChart::from_chart(SphereCap::default()), x);
            assert!(g[0] < 1e-9 && g[1] < 1e-6 && g[2] < 1e-4, "sphere {g:?}");
        }
        let g = max_jet_gap(&Cone, &FdChart::from_chart(Cone), [1.0, 0.3]);
        assert!(g[0] < 1e-9 && g[1] < 1e-6 && g[2] < 1e-5, "cone {g:?}");
    }

    #[test]
    fn polynomial_config_reproduces_saddle() {
        let text = "name = hypar\ntag = hyperbolic\ndomain = -1 1 -1 1\nx = 1 1 0\ny = 1 0 1\nz = -1 1 1\n";
        let chart = polynomial_chart_from_config::<f64>(text).unwrap();
        assert_eq!(chart.name(), "hypar");
        assert_eq!(chart.tag(), GeometryTag::HyperbolicAsymptotic);
        let g = max_jet_gap(&Saddle, &chart, [0.2, -0.4]);
        assert!(g[0] < 1e-10 && g[1] < 1e-7, "{g:?}");
    }

    #[test]
    fn polynomial_config_errors() {
        assert!(polynomial_chart_from_config::<f64>("x = 1 1 0\n").is_err());
        assert!(polynomial_chart_from_config::<f64>("domain = 0 1 0\n").is_err());
        assert!(polynomial_chart_from_config::<f64>("domain = 0 1 0 1\nx = 1 -1 0\n").is_err());
        assert!(polynomial_chart_from_config::<f64>("domain = 0 1 0 1\nw = 1 0 0\n").is_err());
    }

    #[test]
    fn registry_names() {
        for name in BUILTIN_CHARTS {
            assert_eq!(builtin_chart::<f64>(name).unwrap().name(), name);
        }
        assert!(builtin_chart::<f64>("torus").is_none());
    }

    #[test]
    fn disk_domain_membership() {
        let d = SphereCap::<f64>::default();
        assert!(d.check_domain([0.3, 0.3]).is_ok());
        assert!(matches!(d.check_domain([0.5, 0.5]), Err(Error::OutOfDomain { .. })));
    }
}
