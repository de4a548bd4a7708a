//! The shell `Ω = {r(x) + tν(x) : |t| < h/2}`, its volume element and Gauss–Legendre grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg3::Vec3;
use crate::scalar::Real;
use crate::surface::{Chart, PointFrame};

pub const DEFAULT_NODES_PER_WAVELENGTH: usize = 10;
pub const DEFAULT_T_NODES: usize = 4;
pub const DEFAULT_NODE_CAP: u64 = 20_000_000;
pub const MIN_OSCILLATING_NODES: usize = 32;
pub const FLAT_AXIS_NODES: usize = 64;

/// `r(x) + tν(x)`.
pub fn shell_point<T: Real>(frame: &PointFrame<T>, t: T) -> Vec3<T> {
    frame.position + frame.normal * t
}

/// `√det g · (1 + tλ₁)(1 + tλ₂)`.
pub fn volume_element<T: Real>(frame: &PointFrame<T>, t: T) -> Result<T> {
    Ok(frame.area_density * thickness_factor(frame, t)?)
}

/// `(1 + tλ₁)(1 + tλ₂)`, rejecting a nonpositive factor.
pub fn thickness_factor<T: Real>(frame: &PointFrame<T>, t: T) -> Result<T> {
    let f = [T::one() + t * frame.curvatures[0], T::one() + t * frame.curvatures[1]];
    if !(f[0] > T::zero() && f[1] > T::zero()) {
        return Err(Error::ThicknessTooLarge(format!(
            "1 + tλ = ({:e}, {:e}) at t = {:e}, x = ({}, {})",
            f[0].as_f64(),
            f[1].as_f64(),
            t.as_f64(),
            frame.coords[0].as_f64(),
            frame.coords[1].as_f64()
        )));
    }
    Ok(f[0] * f[1])
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "need at least one node");
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre_on<T: Real>(n: usize, lo: T, hi: T) -> Vec<(T, T)> {
    let half = T::lit(0.5) * (hi - lo);
    let mid = T::lit(0.5) * (hi + lo);
    gauss_legendre(n).into_iter().map(|(x, w)| (mid + half * T::lit(x), half * T::lit(w))).collect()
}

/// Node counts for a tensor grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub nodes_per_wavelength: usize,
    pub t_nodes: usize,
    pub node_cap: u64,
    /// Extra multiplier on every axis (1 for a normal run, 2 for the convergence check).
    pub refine: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nodes_per_wavelength: DEFAULT_NODES_PER_WAVELENGTH,
            t_nodes: DEFAULT_T_NODES,
            node_cap: DEFAULT_NODE_CAP,
            refine: 1,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_wavelength < 8 {
            return Err(Error::Precondition(format!(
                "nodes_per_wavelength = {} < 8",
                self.nodes_per_wavelength
            )));
        }
        if self.t_nodes < 2 {
            return Err(Error::Precondition(format!("t_nodes = {} < 2", self.t_nodes)));
        }
        if self.refine == 0 {
            return Err(Error::Precondition("refine = 0".into()));
        }
        Ok(())
    }

    /// Nodes along an axis of length `len`; `frequency = None` for a non-oscillating axis.
    pub fn axis_nodes(&self, len: f64, frequency: Option<f64>) -> usize {
        let base = match frequency {
            Some(phi) => {
                let n = (self.nodes_per_wavelength as f64 * phi * len / (2.0 * PI)).ceil() as usize;
                n.max(MIN_OSCILLATING_NODES)
            }
            None => FLAT_AXIS_NODES,
        };
        base * self.refine
    }
}

/// Tensor Gauss–Legendre layout over a coordinate rectangle times `(-h/2, h/2)`.
#[derive(Clone, Debug)]
pub struct QuadratureLayout<T> {
    pub axes: [Vec<(T, T)>; 2],
    pub thickness: Vec<(T, T)>,
}

impl<T: Real> QuadratureLayout<T> {
    /// `oscillating[i]` marks the axes along which the integrand oscillates at `frequency`.
    pub fn new(lo: [T; 2], hi: [T; 2], h: T, frequency: T, oscillating: [bool; 2], spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        if !(h > T::zero()) {
            return Err(Error::Precondition(format!("thickness h = {:e} must be positive", h.as_f64())));
        }
        let mut counts = [0usize; 2];
        for i in 0..2 {
            let len = (hi[i] - lo[i]).as_f64();
            counts[i] = spec.axis_nodes(len, oscillating[i].then(|| frequency.as_f64()));
        }
        let nt = spec.t_nodes * spec.refine;
        let required = counts[0] as u64 * counts[1] as u64 * nt as u64;
        if required > spec.node_cap {
            return Err(Error::NodeCap { required, cap: spec.node_cap });
        }
        let half = T::lit(0.5) * h;
        Ok(QuadratureLayout {
            axes: [gauss_legendre_on(counts[0], lo[0], hi[0]), gauss_legendre_on(counts[1], lo[1], hi[1])],
            thickness: gauss_legendre_on(nt, -half, half),
        })
    }

    pub fn surface_len(&self) -> usize {
        self.axes[0].len() * self.axes[1].len()
    }

    pub fn total_nodes(&self) -> usize {
        self.surface_len() * self.thickness.len()
    }

    /// Surface node `k` in row-major order: coordinates and product weight.
    pub fn surface_node(&self, k: usize) -> ([T; 2], T) {
        let n2 = self.axes[1].len();
        let (a, b) = (self.axes[0][k / n2], self.axes[1][k % n2]);
        ([a.0, b.0], a.1 * b.1)
    }
}

/// A shell over a chart rectangle with half-thickness `h/2`.
#[derive(Clone)]
pub struct ShellDomain<T> {
    pub chart: Arc<dyn Chart<T>>,
    pub lo: [T; 2],
    pub hi: [T; 2],
    pub h: T,
}

impl<T: Real> ShellDomain<T> {
    pub fn new(chart: Arc<dyn Chart<T>>, lo: [T; 2], hi: [T; 2], h: T) -> Result<Self> {
        for p in [lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]] {
            chart.check_domain(p)?;
        }
        Ok(ShellDomain { chart, lo, hi, h })
    }

    pub fn thickness_ok(&self, frame: &PointFrame<T>) -> Result<()> {
        let m = frame.curvatures[0].abs().max(frame.curvatures[1].abs());
        if self.h * m >= T::lit(2.0) {
            return Err(Error::ThicknessTooLarge(format!(
                "h = {:e} but max|λ| = {:e} at ({}, {})",
                self.h.as_f64(),
                m.as_f64(),
                frame.coords[0].as_f64(),
                frame.coords[1].as_f64()
            )));
        }
        Ok(())
    }
}

/// A layout over a chart shell with the point frame of every surface node cached.
pub struct ShellQuadrature<T> {
    pub layout: QuadratureLayout<T>,
    pub frames: Vec<PointFrame<T>>,
}

pub fn build_grid<T: Real>(
    domain: &ShellDomain<T>,
    frequency: T,
    oscillating: [bool; 2],
    spec: &GridSpec,
) -> Result<ShellQuadrature<T>> {
    let layout = QuadratureLayout::new(domain.lo, domain.hi, domain.h, frequency, oscillating, spec)?;
    let frames = (0..layout.surface_len())
        .map(|k| {
            let f = PointFrame::at(domain.chart.as_ref(), layout.surface_node(k).0)?;
            domain.thickness_ok(&f)?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShellQuadrature { layout, frames })
}

impl<T: Real> ShellQuadrature<T> {
    /// `∫_Ω g(frame, t) dz` with deterministic pairwise reduction.
    pub fn integrate<F>(&self, g: F) -> Result<T>
    where
        F: Fn(&PointFrame<T>, T) -> T + Sync,
    {
        let per_node: Vec<T> = self
            .frames
            .par_iter()
            .enumerate()
            .map(|(k, frame)| {
                let w = self.layout.surface_node(k).1;
                let mut parts = Vec::with_capacity(self.layout.thickness.len());
                for &(t, wt) in &self.layout.thickness {
                    parts.push(g(frame, t) * volume_element(frame, t)? * wt);
                }
                Ok(crate::scalar::pairwise_sum(&parts) * w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(crate::scalar::pairwise_sum(&per_node))
    }
}
