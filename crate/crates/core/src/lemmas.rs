//! Identity suite: pointwise residuals of the structural identities behind the three Ansätze.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ansatz::{
    builtin_ansatz, gradient_identity, identity_residual, symmetric_identity, Ansatz, AnsatzParams, Geometry,
    ParabolicAnsatz,
};
use crate::error::{Error, Result};
use crate::flows::{flat_geodesic, normal_variation, straightness_deviation, ConeNet, CylinderNet, NetGeometry, PrincipalNet};
use crate::linalg3::{nonlinear_strain_phi, sandwich_terms, strain_t, sym, Mat3};
use crate::surface::{asymptotic_residual, hyperbolic_z_v, surface_gradient, Chart, Cone, Cylinder, PointFrame, Saddle};

pub const DEFAULT_THRESHOLD: f64 = 1e-8;
pub const STRAIN_THRESHOLD: f64 = 1e-10;
pub const SANDWICH_SLACK: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_POINT_SAMPLES: usize = 1000;
pub const DEFAULT_MATRIX_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub geometry: Option<Geometry>,
    pub samples: usize,
    pub residual: f64,
    pub threshold: f64,
    /// Samples over the threshold (for the sandwich, over the slack).
    pub violations: u64,
    pub pass: bool,
}

impl fmt::Display for LemmaCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<58} max residual {:.3e} (threshold {:.0e}, {} samples)",
            if self.pass { "ok" } else { "FAIL" },
            self.name,
            self.residual,
            self.threshold,
            self.samples
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Replaces every per-check threshold.
    pub threshold: Option<f64>,
    /// Only checks tied to this geometry.
    pub geometry: Option<Geometry>,
    pub seed: u64,
    pub point_samples: usize,
    pub matrix_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            threshold: None,
            geometry: None,
            seed: DEFAULT_SEED,
            point_samples: DEFAULT_POINT_SAMPLES,
            matrix_samples: DEFAULT_MATRIX_SAMPLES,
        }
    }
}

/// Accepts a geometry name or one of the built-in chart names.
pub fn geometry_filter(name: &str) -> Result<Geometry> {
    match name {
        "saddle" => Ok(Geometry::Hyperbolic),
        "cylinder" | "cone" => Ok(Geometry::Parabolic),
        "sphere-cap" => Ok(Geometry::Elliptic),
        other => other.parse(),
    }
}

struct Acc {
    worst: f64,
    samples: usize,
    over: u64,
    limit: f64,
}

impl Acc {
    fn new(limit: f64) -> Self {
        Acc { worst: 0.0, samples: 0, over: 0, limit }
    }

    fn push(&mut self, r: f64) {
        self.samples += 1;
        if !(r <= self.limit) {
            self.over += 1;
        }
        if !(r <= self.worst) {
            self.worst = r;
        }
    }
}

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<LemmaCheck>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let wanted = |g: Option<Geometry>| opts.geometry.is_none() || (g.is_some() && g == opts.geometry);
    let mut record = |name: &str, g: Option<Geometry>, own: f64, acc: Acc| {
        let threshold = opts.threshold.unwrap_or(own);
        let violations = if opts.threshold.is_some() { 0 } else { acc.over };
        out.push(LemmaCheck {
            name: name.to_string(),
            geometry: g,
            samples: acc.samples,
            residual: acc.worst,
            threshold,
            violations,
            pass: acc.samples > 0 && violations == 0 && acc.worst <= threshold,
        });
    };
    let n = opts.point_samples.max(1);
    let hyp = Some(Geometry::Hyperbolic);
    let par = Some(Geometry::Parabolic);

    if wanted(hyp) {
        let (mut l21, mut l22) = (Acc::new(f64::INFINITY), Acc::new(f64::INFINITY));
        for _ in 0..n {
            let x: [f64; 2] = [rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
            let a = asymptotic_residual(&Saddle, x)?;
            l21.push(a.pi_qdf.max(a.pi11).max(a.pi22));
            let f = PointFrame::at(&Saddle, x)?;
            let df = surface_gradient(&f, [1.0, 0.0]);
            let (z, v) = hyperbolic_z_v(&f, &df)?;
            l22.push((sym(&z.outer(&df)) - f.shape_ambient * v).frobenius());
        }
        record("Lemma 2.1 Π(QDf,QDf) = 0", hyp, DEFAULT_THRESHOLD, l21);
        record("Lemma 2.2 sym Z⊗Df = vΠ", hyp, DEFAULT_THRESHOLD, l22);
    }

    for g in [Geometry::Hyperbolic, Geometry::Parabolic, Geometry::Elliptic] {
        if !wanted(Some(g)) {
            continue;
        }
        let h = 1e-3;
        let ansatz = builtin_ansatz::<f64>(g.default_chart(), AnsatzParams::new(g, h))?;
        let (mut grad, mut symm) = (Acc::new(f64::INFINITY), Acc::new(f64::INFINITY));
        for _ in 0..n {
            let (x, t) = sample_point(ansatz.as_ref(), h, &mut rng);
            let f = ansatz.fields(x)?;
            let s = f.sample(t)?;
            grad.push(identity_residual(gradient_identity(&f.frame, &s), &s.grad));
            symm.push(identity_residual(symmetric_identity(&s), &s.grad));
        }
        record(&format!("Lemma 2.3 |∇y + tP|² expansion [{g}]"), Some(g), DEFAULT_THRESHOLD, grad);
        record(&format!("Lemma 2.3 |sym∇y + t symP|² expansion [{g}]"), Some(g), DEFAULT_THRESHOLD, symm);
    }

    if wanted(par) {
        let h = 1e-4;
        let params = AnsatzParams::new(Geometry::Parabolic, h);
        let cone = AnsatzParams { half_length: 0.4, ..params };
        let nets: [(Arc<dyn NetGeometry<f64>>, AnsatzParams<f64>); 2] = [
            (Arc::new(CylinderNet { p0: [0.0, 0.0], a: params.half_length, epsilon: params.epsilon }), params),
            (Arc::new(ConeNet { p0: [1.0, 0.0], a: cone.half_length, epsilon: cone.epsilon }), cone),
        ];
        let (mut ga13, mut ga16, mut ga17) = (Acc::new(f64::INFINITY), Acc::new(f64::INFINITY), Acc::new(f64::INFINITY));
        for (net, params) in nets {
            let a = ParabolicAnsatz::new(net, params)?;
            for _ in 0..n.div_ceil(2) {
                let x = [
                    rng.gen_range(-params.half_length..params.half_length),
                    rng.gen_range(-0.5 * params.epsilon..0.5 * params.epsilon),
                ];
                let t = rng.gen_range(-0.5 * h..0.5 * h);
                let p = a.parts(x)?;
                let scale = 1.0 + p.w.abs() + p.b.abs() + p.v.abs();
                ga13.push(p.compatibility_residuals().iter().fold(0.0f64, |m, r| m.max(r.abs())) / scale);
                let s = p.fields().sample(t)?;
                let lhs = gradient_identity(&p.point.frame, &s).0;
                let sum = p.gradient_sum_of_squares(t);
                ga16.push((lhs - sum).abs() / (1.0 + sum));
                let strain = p.normal_strain(t).norm_sq();
                ga17.push((strain - (t * p.lambda * p.w).powi(2)).abs() / (1.0 + sum));
            }
        }
        record("compatibility relations v₁ = vϱ, Y(v) = −bλ, Y(b) = λv − w", par, DEFAULT_THRESHOLD, ga13);
        record("parabolic sum-of-squares expansion", par, DEFAULT_THRESHOLD, ga16);
        record("parabolic normal strain = t²λ²w²", par, DEFAULT_THRESHOLD, ga17);

        let (mut straight, mut normal) = (Acc::new(f64::INFINITY), Acc::new(f64::INFINITY));
        for _ in 0..8 {
            let x0 = [rng.gen_range(-0.9..0.9), rng.gen_range(-2.5..2.5)];
            let trace = flat_geodesic(&Cylinder, x0, 1.0, 400)?.complete()?;
            straight.push(straightness_deviation(&trace));
            normal.push(normal_variation(&Cylinder, &trace)?);
        }
        record("Proposition 1.1 flat geodesic straightness", par, DEFAULT_THRESHOLD, straight);
        record("Proposition 1.1 normal constant along the flat geodesic", par, DEFAULT_THRESHOLD, normal);

        let mut comm = Acc::new(f64::INFINITY);
        let charts: [(Arc<dyn Chart<f64>>, [f64; 2], f64, f64); 2] =
            [(Arc::new(Cylinder), [0.0, 0.0], 0.8, 0.5), (Arc::new(Cone), [1.0, 0.0], 0.3, 0.3)];
        for (chart, p0, a, eps) in charts {
            let net = PrincipalNet::with_steps(chart.clone(), p0, a, eps, 64)?;
            for (ts, ss) in [(1.0, 1.0), (-1.0, 0.5), (0.5, -1.0), (-0.7, -0.7)] {
                let (t, s) = (ts * a, ss * eps);
                let along = net.chart_coords([t, s])?;
                let across = net.transversal_flow(t, s, 64)?;
                comm.push((chart.position(along) - chart.position(across)).norm());
            }
        }
        record("principal net flows commute", par, DEFAULT_THRESHOLD, comm);
    }

    if opts.geometry.is_none() {
        let (mut sandwich, mut strain) = (Acc::new(SANDWICH_SLACK), Acc::new(f64::INFINITY));
        for _ in 0..opts.matrix_samples.max(1) {
            let b = random_perturbation(&mut rng, -3.0, 0.0);
            let (lower, phi, upper) = sandwich_terms(&b);
            let excess = (lower - phi).max(phi - upper).max(0.0);
            sandwich.push(excess / lower.max(upper).max(f64::MIN_POSITIVE));
            let a = Mat3::identity() + b;
            let t = strain_t(&a).value;
            let lhs = nonlinear_strain_phi(&b) * 2.0;
            let rhs = t * (t + Mat3::identity() * 2.0);
            strain.push((lhs - rhs).frobenius() / lhs.frobenius());
        }
        record("Lemma 2.4 two-sided strain comparison", None, SANDWICH_SLACK, sandwich);
        record("strain identity 2Φ(B) = T(A)[(AᵀA)^½ + I]", None, STRAIN_THRESHOLD, strain);
    }
    Ok(out)
}

/// Random node of the Ansatz region and a thickness coordinate inside the shell.
fn sample_point(a: &dyn Ansatz<f64>, h: f64, rng: &mut ChaCha8Rng) -> ([f64; 2], f64) {
    let r = a.region();
    let x = loop {
        let x = [rng.gen_range(r.lo[0]..r.hi[0]), rng.gen_range(r.lo[1]..r.hi[1])];
        if r.in_support(x) {
            break x;
        }
    };
    (x, rng.gen_range(-0.5 * h..0.5 * h))
}

/// `B` with entries of size `10^e`, `e` uniform in `[lo, hi]`, and `det(I + B) > 0`.
pub fn random_perturbation(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Mat3<f64> {
    loop {
        let s = 10f64.powf(rng.gen_range(lo..=hi));
        let mut b = Mat3::zero();
        for row in b.0.iter_mut() {
            for v in row.iter_mut() {
                *v = s * rng.gen_range(-1.0..1.0);
            }
        }
        if b.det_identity_plus() > 0.0 {
            return b;
        }
    }
}

/// First failing check, if any.
pub fn first_failure(checks: &[LemmaCheck]) -> Option<&LemmaCheck> {
    checks.iter().find(|c| !c.pass)
}

pub fn require_all(checks: &[LemmaCheck]) -> Result<()> {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("identity checks failed: {}", failed.join("; "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteOptions {
        SuiteOptions { point_samples: 40, matrix_samples: 500, ..SuiteOptions::default() }
    }

    #[test]
    fn suite_passes_at_default_thresholds() {
        let checks = run_suite(&quick()).unwrap();
        for c in &checks {
            assert!(c.pass, "{c}");
        }
        assert!(checks.len() >= 15);
        require_all(&checks).unwrap();
    }

    #[test]
    fn tiny_threshold_names_failures() {
        let opts = SuiteOptions { threshold: Some(1e-16), geometry: Some(Geometry::Hyperbolic), ..quick() };
        let checks = run_suite(&opts).unwrap();
        let err = require_all(&checks).unwrap_err().to_string();
        assert!(err.contains("Lemma 2.3"), "{err}");
        assert!(first_failure(&checks).is_some());
    }

    #[test]
    fn filter_by_chart_name() {
        let g = geometry_filter("cylinder").unwrap();
        let checks = run_suite(&SuiteOptions { geometry: Some(g), ..quick() }).unwrap();
        assert!(checks.iter().all(|c| c.geometry == Some(Geometry::Parabolic)));
        assert!(checks.iter().any(|c| c.name.contains("Proposition 1.1")));
        assert!(geometry_filter("torus").is_err());
    }
}
