//! Korn and rigidity energies of an Ansatz over its shell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{gradient_identity, identity_residual, symmetric_identity, Ansatz, Geometry};
use crate::error::{Error, Result};
use crate::linalg3::{dist_so3_perturbed, nonlinear_strain_phi, rotation_offset, sandwich_terms, sym, Mat3};
use crate::scalar::Real;
use crate::shell::{GridSpec, QuadratureLayout};

/// Node counts of the grid a report was computed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMeta {
    pub nodes: [usize; 2],
    pub t_nodes: usize,
    pub total: usize,
}

/// Energies of one Ansatz at one thickness. All integrals are over the shell `Ω` with the
/// volume element, so each carries one factor `h` from the thickness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub geometry: Geometry,
    pub chart: String,
    pub h: f64,
    pub tau: f64,
    /// `‖∇y‖²`.
    pub e_grad: f64,
    /// `‖sym∇y‖²`.
    pub e_sym: f64,
    /// `‖∇u − I‖²`.
    pub e_defgrad: f64,
    /// `‖dist(∇u, SO(3))‖²`.
    pub e_dist: f64,
    /// `‖Φ(h^τ∇y)‖²`.
    pub e_phi: f64,
    /// `‖∇u − Q‖²` with `Q` the polar factor of the mean of `∇u`.
    pub e_defgrad_best: f64,
    pub volume: f64,
    pub ratio: f64,
    pub korn_ratio: f64,
    pub ratio_best: f64,
    /// Nodes with `det ∇u ≤ 0` or a degenerate `∇u`.
    pub flagged_nodes: u64,
    pub sandwich_violations: u64,
    pub max_residual_grad: f64,
    pub max_residual_sym: f64,
    /// Smallest `|∇y + tP|² / |∇y|²` over the grid.
    pub min_frame_ratio: f64,
    pub min_det: f64,
    pub grid: GridMeta,
}

pub const CSV_HEADER: &str = "h,E_grad,E_sym,E_defgrad,E_dist,ratio,korn_ratio,flagged_nodes";

impl EnergyReport {
    pub fn is_valid(&self) -> bool {
        self.flagged_nodes == 0
            && [self.e_grad, self.e_sym, self.e_defgrad, self.e_dist].iter().all(|v| v.is_finite() && *v > 0.0)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.h, self.e_grad, self.e_sym, self.e_defgrad, self.e_dist, self.ratio, self.korn_ratio, self.flagged_nodes
        )
    }
}

#[derive(Clone, Copy, Debug)]
struct Acc<T> {
    grad: T,
    sym: T,
    defgrad: T,
    dist: T,
    phi: T,
    volume: T,
    int_b: Mat3<T>,
    flagged: u64,
    sandwich: u64,
    res: [T; 2],
    frame_ratio: T,
    min_det: T,
}

impl<T: Real> Acc<T> {
    fn zero() -> Self {
        Acc {
            grad: T::zero(),
            sym: T::zero(),
            defgrad: T::zero(),
            dist: T::zero(),
            phi: T::zero(),
            volume: T::zero(),
            int_b: Mat3::zero(),
            flagged: 0,
            sandwich: 0,
            res: [T::zero(); 2],
            frame_ratio: T::infinity(),
            min_det: T::infinity(),
        }
    }

    fn merge(self, o: Self) -> Self {
        Acc {
            grad: self.grad + o.grad,
            sym: self.sym + o.sym,
            defgrad: self.defgrad + o.defgrad,
            dist: self.dist + o.dist,
            phi: self.phi + o.phi,
            volume: self.volume + o.volume,
            int_b: self.int_b + o.int_b,
            flagged: self.flagged + o.flagged,
            sandwich: self.sandwich + o.sandwich,
            res: [self.res[0].max(o.res[0]), self.res[1].max(o.res[1])],
            frame_ratio: self.frame_ratio.min(o.frame_ratio),
            min_det: self.min_det.min(o.min_det),
        }
    }
}

fn tree<T: Real>(xs: &[Acc<T>]) -> Acc<T> {
    match xs.len() {
        0 => Acc::zero(),
        1 => xs[0],
        n => tree(&xs[..n / 2]).merge(tree(&xs[n / 2..])),
    }
}

fn node<T: Real>(ansatz: &dyn Ansatz<T>, layout: &QuadratureLayout<T>, x: [T; 2], ws: T) -> Result<Acc<T>> {
    if !ansatz.region().in_support(x) {
        return Ok(Acc::zero());
    }
    let scale = ansatz.params().scale();
    let fields = ansatz.fields(x)?;
    let mut parts = Vec::with_capacity(layout.thickness.len());
    for &(t, wt) in &layout.thickness {
        let s = fields.sample(t)?;
        let dv = fields.volume_element(t)? * ws * wt;
        let g = s.grad;
        let b = g * scale;
        let det = b.det_identity_plus();
        let d = dist_so3_perturbed(&b);
        let (lo, phi, up) = sandwich_terms(&b);
        let slack = T::lit(1e-12) * lo.max(up);
        let g2 = g.frobenius_sq();
        let framed = (g + s.p * t).frobenius_sq();
        parts.push(Acc {
            grad: g2 * dv,
            sym: sym(&g).frobenius_sq() * dv,
            defgrad: b.frobenius_sq() * dv,
            dist: d.value * d.value * dv,
            phi: nonlinear_strain_phi(&b).frobenius_sq() * dv,
            volume: dv,
            int_b: b * dv,
            flagged: u64::from(det <= T::zero() || d.orientation_reversing || d.degenerate),
            sandwich: u64::from(lo > phi + slack || phi > up + slack),
            res: [
                identity_residual(gradient_identity(&fields.frame, &s), &g),
                identity_residual(symmetric_identity(&s), &g),
            ],
            frame_ratio: if g2 > T::zero() { framed / g2 } else { T::infinity() },
            min_det: det,
        });
    }
    Ok(tree(&parts))
}

fn integrate<T: Real>(ansatz: &dyn Ansatz<T>, spec: &GridSpec) -> Result<(Acc<T>, QuadratureLayout<T>)> {
    let p = ansatz.params();
    p.validate()?;
    let region = ansatz.region();
    let layout = QuadratureLayout::new(region.lo, region.hi, p.h, p.frequency(), region.oscillating, spec)?;
    let n2 = layout.axes[1].len();
    let rows = (0..layout.axes[0].len())
        .into_par_iter()
        .map(|i| {
            let accs = (0..n2)
                .map(|j| {
                    let (x, w) = layout.surface_node(i * n2 + j);
                    node(ansatz, &layout, x, w)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(tree(&accs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((tree(&rows), layout))
}

/// All energies of `ansatz` on a grid built from `spec`.
pub fn evaluate_energies<T: Real>(ansatz: &dyn Ansatz<T>, spec: &GridSpec) -> Result<EnergyReport> {
    let (acc, layout) = integrate(ansatz, spec)?;
    if !(acc.volume > T::zero()) {
        return Err(Error::Degenerate("empty integration region".into()));
    }
    let k = rotation_offset(&(acc.int_b * (T::one() / acc.volume))).unwrap_or_else(Mat3::zero);
    let best = (acc.defgrad - T::lit(2.0) * k.ddot(&acc.int_b) + k.frobenius_sq() * acc.volume).max(T::zero());
    let p = ansatz.params();
    let f = |v: T| v.as_f64();
    Ok(EnergyReport {
        geometry: p.geometry,
        chart: ansatz.chart_name().to_string(),
        h: f(p.h),
        tau: f(p.tau),
        e_grad: f(acc.grad),
        e_sym: f(acc.sym),
        e_defgrad: f(acc.defgrad),
        e_dist: f(acc.dist),
        e_phi: f(acc.phi),
        e_defgrad_best: f(best),
        volume: f(acc.volume),
        ratio: f(acc.defgrad / acc.dist),
        korn_ratio: f(acc.grad / acc.sym),
        ratio_best: f(best / acc.dist),
        flagged_nodes: acc.flagged,
        sandwich_violations: acc.sandwich,
        max_residual_grad: f(acc.res[0]),
        max_residual_sym: f(acc.res[1]),
        min_frame_ratio: f(acc.frame_ratio),
        min_det: f(acc.min_det),
        grid: GridMeta {
            nodes: [layout.axes[0].len(), layout.axes[1].len()],
            t_nodes: layout.thickness.len(),
            total: layout.total_nodes(),
        },
    })
}

/// Largest relative residuals of the gradient and symmetric decomposition identities over the grid.
pub fn decomposition_residuals<T: Real>(ansatz: &dyn Ansatz<T>, spec: &GridSpec) -> Result<(f64, f64)> {
    let (acc, _) = integrate(ansatz, spec)?;
    Ok((acc.res[0].as_f64(), acc.res[1].as_f64()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ansatz::{builtin_ansatz, AffineField, AnsatzParams};
    use crate::surface::{Plane, Saddle};

    #[test]
    fn zero_field_has_zero_energies() {
        let params = AnsatzParams::new(Geometry::Hyperbolic, 1e-2);
        let a = AffineField::new(Arc::new(Saddle), params, Mat3::zero(), [-0.5; 2], [0.5; 2]).unwrap();
        let r = evaluate_energies(&a, &GridSpec::default()).unwrap();
        assert_eq!((r.e_grad, r.e_sym, r.e_defgrad, r.e_dist), (0.0, 0.0, 0.0, 0.0));
        assert!(!r.is_valid());
    }

    #[test]
    fn rigid_motion_has_no_distance() {
        let params = AnsatzParams::new(Geometry::Hyperbolic, 1e-2);
        let rot = Mat3::rotation(crate::linalg3::Vec3::new(1.0, 2.0, -0.5).normalized(), 0.3);
        let a = AffineField::rigid(Arc::new(Saddle), params, rot, [-0.5; 2], [0.5; 2]).unwrap();
        let r = evaluate_energies(&a, &GridSpec::default()).unwrap();
        assert!(r.e_dist < 1e-20 * r.e_defgrad, "{}", r.e_dist);
        let expected = (rot - Mat3::identity()).frobenius_sq() * r.volume;
        assert!((r.e_defgrad - expected).abs() < 1e-12 * expected);
        assert!(r.e_defgrad_best < 1e-20);
        assert_eq!(r.flagged_nodes, 0);
    }

    #[test]
    fn flat_plate_identity_residual() {
        let params = AnsatzParams::new(Geometry::Hyperbolic, 1e-2);
        let m = Mat3([[0.1, 0.4, -0.3], [0.0, 1.2, 0.5], [0.7, -0.2, 0.3]]);
        let a = AffineField::new(Arc::new(Plane), params, m, [-0.5; 2], [0.5; 2]).unwrap();
        let (g, s) = decomposition_residuals(&a, &GridSpec::default()).unwrap();
        assert!(g < 1e-10 && s < 1e-10);
    }

    #[test]
    fn hyperbolic_report_invariants() {
        let h = 1e-3;
        let a = builtin_ansatz::<f64>("saddle", AnsatzParams::new(Geometry::Hyperbolic, h)).unwrap();
        let r = evaluate_energies(a.as_ref(), &GridSpec::default()).unwrap();
        assert!(r.is_valid(), "{r:?}");
        let tau = r.tau;
        assert!((r.e_defgrad / (h.powf(2.0 * tau) * r.e_grad) - 1.0).abs() < 1e-12);
        assert!(r.e_dist <= 12.0 * r.e_phi);
        assert_eq!(r.sandwich_violations, 0);
        assert!(r.max_residual_grad < 1e-8 && r.max_residual_sym < 1e-8);
        assert!(r.ratio_best <= r.ratio * (1.0 + 1e-12));
        assert!(r.min_det > 0.9);
        let sigma = (1.0 - h * 2.0f64.sqrt()).powi(2);
        assert!(r.min_frame_ratio >= sigma * (1.0 - 1e-12), "{}", r.min_frame_ratio);
        let c = r.e_phi / h.powf(1.0 + 2.0 * tau);
        assert!((1e-3..=1e3).contains(&c), "{c}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let a = builtin_ansatz::<f64>("cylinder", AnsatzParams::new(Geometry::Parabolic, 1e-4)).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| evaluate_energies(a.as_ref(), &GridSpec::default()).unwrap())
        };
        let (a1, a4) = (run(1), run(4));
        assert_eq!(a1.csv_row(), a4.csv_row());
        assert_eq!(a1, a4);
    }
}
