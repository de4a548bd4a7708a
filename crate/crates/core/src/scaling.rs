//! Thickness sweeps and log-log exponent fits.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ansatz_on_chart, builtin_ansatz, Ansatz, AnsatzParams, Geometry};
use crate::error::{Error, Result};
use crate::rigidity::{evaluate_energies, EnergyReport};
use crate::shell::GridSpec;
use crate::surface::polynomial_chart_from_config;

pub const DEFAULT_POINTS: usize = 12;
pub const VERDICT_TOLERANCE: f64 = 0.1;
pub const TAU_TOLERANCE: f64 = 0.05;

/// Default `h` range as powers of two, `(largest, smallest)`.
pub fn default_h_exponents(g: Geometry) -> (f64, f64) {
    match g {
        Geometry::Hyperbolic => (-10.0, -24.0),
        Geometry::Parabolic => (-24.0, -48.0),
        Geometry::Elliptic => (-8.0, -18.0),
    }
}

/// `n` geometrically spaced values from `2^hi` down to `2^lo`.
pub fn geometric_hs(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi.exp2()];
    }
    (0..n).map(|k| (hi + (lo - hi) * k as f64 / (n - 1) as f64).exp2()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub geometry: Geometry,
    pub chart: String,
    pub hs: Vec<f64>,
    pub tau: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub half_length: f64,
    pub nodes_per_wavelength: usize,
    pub t_nodes: usize,
    pub node_cap: u64,
    pub refine: usize,
    /// Polynomial chart definition used instead of the named built-in chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_text: Option<String>,
}

impl SweepConfig {
    pub fn new(geometry: Geometry) -> Self {
        let (hi, lo) = default_h_exponents(geometry);
        let p = AnsatzParams::<f64>::new(geometry, 1.0);
        let g = GridSpec::default();
        SweepConfig {
            geometry,
            chart: geometry.default_chart().to_string(),
            hs: geometric_hs(hi, lo, DEFAULT_POINTS),
            tau: p.tau,
            delta: p.delta,
            epsilon: p.epsilon,
            half_length: p.half_length,
            nodes_per_wavelength: g.nodes_per_wavelength,
            t_nodes: g.t_nodes,
            node_cap: g.node_cap,
            refine: g.refine,
            chart_text: None,
        }
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            nodes_per_wavelength: self.nodes_per_wavelength,
            t_nodes: self.t_nodes,
            node_cap: self.node_cap,
            refine: self.refine,
        }
    }

    pub fn params(&self, h: f64) -> AnsatzParams<f64> {
        AnsatzParams {
            geometry: self.geometry,
            h,
            tau: self.tau,
            delta: self.delta,
            epsilon: self.epsilon,
            half_length: self.half_length,
        }
    }

    pub fn ansatz(&self, h: f64) -> Result<Arc<dyn Ansatz<f64>>> {
        match &self.chart_text {
            Some(text) => ansatz_on_chart(Arc::new(polynomial_chart_from_config::<f64>(text)?), self.params(h)),
            None => builtin_ansatz(&self.chart, self.params(h)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hs.is_empty() {
            return Err(Error::Config("empty h list".into()));
        }
        if self.hs.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("h values must be strictly decreasing".into()));
        }
        self.grid().validate()?;
        self.params(self.hs[0]).validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub h: f64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub reports: Vec<EnergyReport>,
    pub failures: Vec<SweepFailure>,
}

/// One report per `h`; failing thicknesses are recorded and skipped.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let grid = config.grid();
    let results: Vec<Result<EnergyReport>> = config
        .hs
        .par_iter()
        .map(|&h| {
            let a = config.ansatz(h)?;
            evaluate_energies(a.as_ref(), &grid)
        })
        .collect();
    let mut out = SweepOutcome { reports: Vec::new(), failures: Vec::new() };
    for (h, r) in config.hs.iter().zip(results) {
        match r {
            Ok(rep) => out.reports.push(rep),
            Err(e) => out.failures.push(SweepFailure { h: *h, error: e.to_string() }),
        }
    }
    if out.reports.is_empty() {
        let first = out.failures.first().map(|f| f.error.clone()).unwrap_or_default();
        return Err(Error::Precondition(format!("every thickness failed; first error: {first}")));
    }
    Ok(out)
}

/// Quantity to fit against `1/h`. The energy selectors are divided by `h`, the thickness
/// measure common to every shell integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Ratio,
    KornRatio,
    Grad,
    Sym,
    Defgrad,
    Dist,
}

impl Quantity {
    pub fn value(self, r: &EnergyReport) -> f64 {
        CsvRecord::from(r).value(self)
    }
}

/// One data row of a sweep CSV (see [`CSV_HEADER`](crate::rigidity::CSV_HEADER)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub h: f64,
    pub e_grad: f64,
    pub e_sym: f64,
    pub e_defgrad: f64,
    pub e_dist: f64,
    pub ratio: f64,
    pub korn_ratio: f64,
    pub flagged_nodes: u64,
}

impl From<&EnergyReport> for CsvRecord {
    fn from(r: &EnergyReport) -> Self {
        CsvRecord {
            h: r.h,
            e_grad: r.e_grad,
            e_sym: r.e_sym,
            e_defgrad: r.e_defgrad,
            e_dist: r.e_dist,
            ratio: r.ratio,
            korn_ratio: r.korn_ratio,
            flagged_nodes: r.flagged_nodes,
        }
    }
}

impl CsvRecord {
    pub fn parse(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 8 {
            return Err(Error::Config(format!("expected 8 columns, got {}: `{line}`", cols.len())));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i].parse::<f64>().map_err(|e| Error::Config(format!("column {}: `{}`: {e}", i + 1, cols[i])))
        };
        Ok(CsvRecord {
            h: f(0)?,
            e_grad: f(1)?,
            e_sym: f(2)?,
            e_defgrad: f(3)?,
            e_dist: f(4)?,
            ratio: f(5)?,
            korn_ratio: f(6)?,
            flagged_nodes: cols[7].parse().map_err(|e| Error::Config(format!("column 8: `{}`: {e}", cols[7])))?,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.flagged_nodes == 0
            && [self.e_grad, self.e_sym, self.e_defgrad, self.e_dist].iter().all(|v| v.is_finite() && *v > 0.0)
    }

    pub fn value(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Ratio => self.ratio,
            Quantity::KornRatio => self.korn_ratio,
            Quantity::Grad => self.e_grad / self.h,
            Quantity::Sym => self.e_sym / self.h,
            Quantity::Defgrad => self.e_defgrad / self.h,
            Quantity::Dist => self.e_dist / self.h,
        }
    }
}

/// Comment lines `# key = value` and data rows of a sweep CSV.
pub fn parse_csv(text: &str) -> Result<(Vec<(String, String)>, Vec<CsvRecord>)> {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut header = false;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else if !header {
            if line != crate::rigidity::CSV_HEADER {
                return Err(Error::Config(format!("unexpected CSV header `{line}`")));
            }
            header = true;
        } else {
            rows.push(CsvRecord::parse(line)?);
        }
    }
    if !header {
        return Err(Error::Config("CSV has no header line".into()));
    }
    Ok((meta, rows))
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Ratio => "ratio",
            Quantity::KornRatio => "korn-ratio",
            Quantity::Grad => "grad",
            Quantity::Sym => "sym",
            Quantity::Defgrad => "defgrad",
            Quantity::Dist => "dist",
        })
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ratio" => Quantity::Ratio,
            "korn-ratio" => Quantity::KornRatio,
            "grad" => Quantity::Grad,
            "sym" => Quantity::Sym,
            "defgrad" => Quantity::Defgrad,
            "dist" => Quantity::Dist,
            other => return Err(Error::Config(format!("unknown quantity `{other}`"))),
        })
    }
}

/// Least-squares line `ln q = intercept + slope · ln(1/h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub std_err: f64,
    pub residual_norm: f64,
    /// `(h, q)` pairs used.
    pub points: Vec<(f64, f64)>,
}

pub fn fit_points(points: &[(f64, f64)]) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        points.iter().copied().filter(|(h, q)| *h > 0.0 && *q > 0.0 && h.is_finite() && q.is_finite()).collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: pts.len() });
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(h, _)| -h.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, q)| q.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all h values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(FitResult {
        slope,
        intercept,
        std_err: (rss / (n - 2.0) / sxx).sqrt(),
        residual_norm: rss.sqrt(),
        points: pts,
    })
}

/// Fits `quantity` over the valid reports.
pub fn fit_exponent(reports: &[EnergyReport], quantity: Quantity) -> Result<FitResult> {
    let rows: Vec<CsvRecord> = reports.iter().map(CsvRecord::from).collect();
    fit_records(&rows, quantity)
}

pub fn fit_records(rows: &[CsvRecord], quantity: Quantity) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.is_valid()).map(|r| (r.h, r.value(quantity))).collect();
    fit_points(&pts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub geometry: Geometry,
    pub slope: f64,
    pub target: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verdict(fit: &FitResult, geometry: Geometry, tolerance: f64) -> Verdict {
    let target = geometry.target_exponent();
    let gap = fit.slope - target;
    Verdict { geometry, slope: fit.slope, target, gap, tolerance, pass: gap.abs() <= tolerance }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: slope {:.4}, target {:.4}, gap {:+.4} (tolerance {}) -> {}",
            self.geometry,
            self.slope,
            self.target,
            self.gap,
            self.tolerance,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Slopes at two values of `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauCheck {
    pub taus: [f64; 2],
    pub slopes: [f64; 2],
    pub difference: f64,
    pub pass: bool,
}

pub fn tau_independence(a: &FitResult, b: &FitResult, taus: [f64; 2]) -> TauCheck {
    let difference = (a.slope - b.slope).abs();
    TauCheck { taus, slopes: [a.slope, b.slope], difference, pass: difference < TAU_TOLERANCE }
}

/// Refit without the largest-`h` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub slope_without_largest: f64,
    pub shift: f64,
    pub pass: bool,
}

pub fn stability_check(fit: &FitResult) -> Result<StabilityCheck> {
    let largest = fit.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let rest: Vec<(f64, f64)> = fit.points.iter().copied().filter(|p| p.0 != largest).collect();
    let refit = fit_points(&rest)?;
    let shift = (refit.slope - fit.slope).abs();
    Ok(StabilityCheck { slope_without_largest: refit.slope, shift, pass: shift < 3.0 * fit.std_err.max(1e-3) })
}

/// Exponents in `h` of the thickness-normalized Korn quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KornCheck {
    pub geometry: Geometry,
    pub grad_exponent: f64,
    pub sym_exponent: f64,
    pub korn_exponent: f64,
    pub pass: bool,
    pub excluded: usize,
}

pub fn korn_bounds_check(reports: &[EnergyReport], geometry: Geometry) -> Result<KornCheck> {
    let rows: Vec<CsvRecord> = reports.iter().map(CsvRecord::from).collect();
    korn_bounds_check_records(&rows, geometry)
}

pub fn korn_bounds_check_records(rows: &[CsvRecord], geometry: Geometry) -> Result<KornCheck> {
    let valid: Vec<CsvRecord> = rows.iter().filter(|r| r.is_valid()).copied().collect();
    let e = |q| fit_records(&valid, q).map(|f| -f.slope);
    let (grad, symm, korn) = (e(Quantity::Grad)?, e(Quantity::Sym)?, e(Quantity::KornRatio)?);
    let pass = match geometry {
        Geometry::Hyperbolic => (grad + 4.0 / 3.0).abs() <= 0.1 && symm.abs() <= 0.15,
        Geometry::Parabolic => (grad + 1.5).abs() <= 0.1,
        Geometry::Elliptic => (korn + 1.0).abs() <= 0.15,
    };
    Ok(KornCheck {
        geometry,
        grad_exponent: grad,
        sym_exponent: symm,
        korn_exponent: korn,
        pass,
        excluded: rows.len() - valid.len(),
    })
}
