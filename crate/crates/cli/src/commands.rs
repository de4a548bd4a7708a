use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use shellrig::ansatz::{oracle_check, Geometry};
use shellrig::flows::{flat_direction, geodesic_flow, normal_variation, straightness_deviation, DEFAULT_STEPS};
use shellrig::lemmas::{geometry_filter, run_suite, SuiteOptions};
use shellrig::rigidity::CSV_HEADER;
use shellrig::scaling::{
    default_h_exponents, fit_exponent, fit_records, geometric_hs, korn_bounds_check, korn_bounds_check_records,
    parse_csv, run_sweep, stability_check, tau_independence, verdict, Quantity, SweepConfig, DEFAULT_POINTS,
    VERDICT_TOLERANCE,
};
use shellrig::surface::{builtin_chart, polynomial_chart_from_config, Chart, PointFrame};

use crate::args::{FitArgs, Format, GeodesicArgs, InspectArgs, LemmasArgs, ModelArgs, SweepArgs};
use crate::resolve::{log2_h, parse_h, Resolver};
use crate::{Failure, FORMAT_VERSION};

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn artifact(command: &str, res: &Resolver, body: Value) -> Value {
    let mut v = json!({ "format_version": FORMAT_VERSION, "command": command, "config": res.echo_json() });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(Some(path), &(text + "\n"))
}

fn path_string(p: Option<PathBuf>) -> Option<String> {
    p.map(|p| p.display().to_string())
}

fn read_text(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
}

pub fn lemmas(a: LemmasArgs, res: &mut Resolver) -> Result<(), Failure> {
    res.record("command", "lemmas".into());
    let defaults = SuiteOptions::default();
    let filter: Option<String> = res.optional("geometry", a.geometry)?;
    let opts = SuiteOptions {
        threshold: res.optional("threshold", a.threshold)?,
        geometry: filter.as_deref().map(geometry_filter).transpose()?,
        seed: res.value("seed", a.seed, || defaults.seed)?,
        point_samples: res.value("samples", a.samples, || defaults.point_samples)?,
        matrix_samples: res.value("matrices", a.matrices, || defaults.matrix_samples)?,
    };
    let format = a.format.unwrap_or(Format::Text);
    let checks = run_suite(&opts)?;
    if format == Format::Text {
        let mut out = String::new();
        for c in &checks {
            let _ = writeln!(out, "{c}");
        }
        emit(None, &out)?;
    }
    let report = artifact("lemmas", res, json!({ "checks": checks }));
    if format == Format::Json {
        emit(None, &(serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))? + "\n"))?;
    }
    if let Some(p) = &a.json {
        write_json(p, &report)?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join("; ")))
    }
}

/// Geometry from a geometry or chart name; a chart name also becomes the default chart.
fn model(m: &ModelArgs, res: &mut Resolver) -> Result<SweepConfig, Failure> {
    let name: String = res
        .optional("geometry", m.geometry.clone())?
        .ok_or_else(|| Failure::Usage("--geometry is required (hyperbolic, parabolic or elliptic)".into()))?;
    let geometry = geometry_filter(&name)?;
    let mut cfg = SweepConfig::new(geometry);
    let chart_default = if builtin_chart::<f64>(&name).is_some() { name.clone() } else { cfg.chart.clone() };
    res.record("geometry", geometry.to_string());
    cfg.chart = res.value("chart", m.chart.clone(), || chart_default)?;
    if let Some(path) = res.optional("chart_file", path_string(m.chart_file.clone()))? {
        cfg.chart_text = Some(read_text(&path)?);
    }
    cfg.tau = res.value("tau", m.tau, || cfg.tau)?;
    cfg.delta = res.value("delta", m.delta, || cfg.delta)?;
    cfg.epsilon = res.value("epsilon", m.epsilon, || cfg.epsilon)?;
    cfg.half_length = res.value("half_length", m.half_length, || cfg.half_length)?;
    Ok(cfg)
}

fn csv_text(res: &Resolver, rows: &[String]) -> String {
    let mut s = format!("# format_version = {FORMAT_VERSION}\n");
    for (k, v) in res.echo() {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(s, "{r}");
    }
    s
}

pub fn sweep(a: SweepArgs, res: &mut Resolver, verbose: bool) -> Result<(), Failure> {
    res.record("command", "sweep".into());
    let mut cfg = model(&a.model, res)?;
    let (hi, lo) = default_h_exponents(cfg.geometry);
    let h_max: String = res.value("h_max", a.h_max, || format!("2^{hi}"))?;
    let h_min: String = res.value("h_min", a.h_min, || format!("2^{lo}"))?;
    let points: usize = res.value("points", a.points, || DEFAULT_POINTS)?;
    if points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    cfg.hs = geometric_hs(log2_h(&h_max)?, log2_h(&h_min)?, points);
    cfg.nodes_per_wavelength = res.value("nodes_per_wavelength", a.grid.nodes_per_wavelength, || cfg.nodes_per_wavelength)?;
    cfg.t_nodes = res.value("t_nodes", a.grid.t_nodes, || cfg.t_nodes)?;
    cfg.node_cap = res.value("node_cap", a.grid.node_cap, || cfg.node_cap)?;
    cfg.refine = res.value("refine", a.grid.refine, || cfg.refine)?;
    let quantity: Quantity = res.value("quantity", a.quantity.map(|q| q.parse()).transpose()?, || Quantity::Ratio)?;
    let tolerance: f64 = res.value("tolerance", a.tolerance, || VERDICT_TOLERANCE)?;
    let alt_tau: Option<f64> = res.optional("alt_tau", a.alt_tau)?;
    cfg.validate()?;

    let out = run_sweep(&cfg)?;
    if verbose {
        for r in &out.reports {
            eprintln!("h = {:e}: ratio {:e}, {} nodes, flagged {}", r.h, r.ratio, r.grid.total, r.flagged_nodes);
        }
    }
    for f in &out.failures {
        eprintln!("warning: h = {:e} failed: {}", f.h, f.error);
    }
    let rows: Vec<String> = out.reports.iter().map(|r| r.csv_row()).collect();
    emit(a.output.as_deref(), &csv_text(res, &rows))?;

    let fit = fit_exponent(&out.reports, quantity)?;
    let v = verdict(&fit, cfg.geometry, tolerance);
    let stability = stability_check(&fit).ok();
    let korn = korn_bounds_check(&out.reports, cfg.geometry).ok();
    let tau_check = match alt_tau {
        Some(t2) => {
            let alt_cfg = SweepConfig { tau: t2, ..cfg.clone() };
            let alt = run_sweep(&alt_cfg)?;
            let alt_fit = fit_exponent(&alt.reports, quantity)?;
            Some((tau_independence(&fit, &alt_fit, [cfg.tau, t2]), alt))
        }
        None => None,
    };
    let mut summary = format!("{v}\nfit: slope {:.4} ± {:.4}, {} points\n", fit.slope, fit.std_err, fit.points.len());
    if let Some(s) = &stability {
        let _ = writeln!(summary, "without largest h: slope {:.4} ({})", s.slope_without_largest, if s.pass { "stable" } else { "unstable" });
    }
    if let Some(k) = &korn {
        let _ = writeln!(
            summary,
            "Korn exponents in h: grad {:.4}, sym {:.4}, ratio {:.4} ({})",
            k.grad_exponent,
            k.sym_exponent,
            k.korn_exponent,
            if k.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some((t, _)) = &tau_check {
        let _ = writeln!(
            summary,
            "τ = {} vs {}: slopes {:.4} vs {:.4}, difference {:.4} ({})",
            t.taus[0],
            t.taus[1],
            t.slopes[0],
            t.slopes[1],
            t.difference,
            if t.pass { "pass" } else { "FAIL" }
        );
    }
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    if let Some(p) = &a.json {
        let body = json!({
            "quantity": quantity,
            "reports": out.reports,
            "failures": out.failures,
            "fit": fit,
            "verdict": v,
            "stability": stability,
            "korn": korn,
            "tau_check": tau_check.as_ref().map(|(t, _)| t),
            "alternate_reports": tau_check.as_ref().map(|(_, o)| &o.reports),
        });
        write_json(p, &artifact("sweep", res, body))?;
    }
    let tau_ok = tau_check.as_ref().is_none_or(|(t, _)| t.pass);
    if v.pass && tau_ok {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} exponent outside tolerance or τ-dependent", cfg.geometry)))
    }
}

pub fn fit(a: FitArgs, res: &mut Resolver) -> Result<(), Failure> {
    res.record("command", "fit".into());
    let input = a.input.display().to_string();
    let (meta, rows) = parse_csv(&read_text(&input)?)?;
    res.record("input", input);
    let recorded = meta.iter().rev().find(|(k, _)| k == "geometry").map(|(_, v)| v.clone());
    let name: String = res
        .optional("geometry", a.geometry.or(recorded))?
        .ok_or_else(|| Failure::Usage("CSV records no geometry; pass --geometry".into()))?;
    let geometry: Geometry = geometry_filter(&name)?;
    let quantity: Quantity = res.value("quantity", a.quantity.map(|q| q.parse()).transpose()?, || Quantity::Ratio)?;
    let tolerance: f64 = res.value("tolerance", a.tolerance, || VERDICT_TOLERANCE)?;
    let excluded = rows.iter().filter(|r| !r.is_valid()).count();
    if excluded > 0 {
        eprintln!("note: {excluded} invalid row(s) excluded");
    }
    let fit = fit_records(&rows, quantity)?;
    let v = verdict(&fit, geometry, tolerance);
    let korn = korn_bounds_check_records(&rows, geometry).ok();
    println!("{v}\nfit: slope {:.4} ± {:.4}, {} points", fit.slope, fit.std_err, fit.points.len());
    if let Some(p) = &a.json {
        let body = json!({ "source_config": meta.into_iter().map(|(k, v)| (k, Value::String(v))).collect::<serde_json::Map<_, _>>(), "fit": fit, "verdict": v, "korn": korn });
        write_json(p, &artifact("fit", res, body))?;
    }
    if v.pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("{geometry} exponent outside tolerance")))
    }
}

fn chart_from(name: String, file: Option<String>) -> Result<std::sync::Arc<dyn Chart<f64>>, Failure> {
    match file {
        Some(p) => Ok(std::sync::Arc::new(polynomial_chart_from_config::<f64>(&read_text(&p)?)?)),
        None => builtin_chart(&name).ok_or_else(|| Failure::Usage(format!("unknown chart `{name}`"))),
    }
}

pub fn geodesic(a: GeodesicArgs, res: &mut Resolver) -> Result<(), Failure> {
    res.record("command", "geodesic".into());
    let name: String = res.value("chart", a.chart, || "cylinder".to_string())?;
    let file = res.optional("chart_file", path_string(a.chart_file))?;
    let chart = chart_from(name, file)?;
    let x0 = [res.value("x1", a.x1, || 0.0)?, res.value("x2", a.x2, || 0.0)?];
    let length: f64 = res.value("length", a.length, || 1.0)?;
    let steps: usize = res.value("steps", a.steps, || DEFAULT_STEPS)?;
    let angle: Option<f64> = res.optional("angle", a.angle)?;
    let frame = PointFrame::at(chart.as_ref(), x0)?;
    let dir = match angle {
        Some(th) => frame.directions[0] * th.cos() + frame.directions[1] * th.sin(),
        None => flat_direction(&frame)?,
    };
    let trace = geodesic_flow(chart.as_ref(), x0, &dir, length, steps)?;
    if trace.exited {
        eprintln!("warning: left the chart domain after arc length {:e}", trace.achieved());
    }
    let straight = straightness_deviation(&trace);
    let normal = normal_variation(chart.as_ref(), &trace)?;
    let mut csv = format!("# format_version = {FORMAT_VERSION}\n");
    for (k, v) in res.echo() {
        let _ = writeln!(csv, "# {k} = {v}");
    }
    csv.push_str("s,x1,x2,px,py,pz\n");
    for ((s, c), p) in trace.params.iter().zip(&trace.coords).zip(&trace.points) {
        let _ = writeln!(csv, "{s:e},{:e},{:e},{:e},{:e},{:e}", c[0], c[1], p.0[0], p.0[1], p.0[2]);
    }
    emit(a.output.as_deref(), &csv)?;
    let summary =
        format!("arc length {:e}, straightness deviation {straight:.3e}, max |∇_γ̇ ν| {normal:.3e}\n", trace.achieved());
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    if let Some(p) = &a.json {
        let body = json!({
            "achieved_length": trace.achieved(),
            "exited": trace.exited,
            "straightness_deviation": straight,
            "normal_variation": normal,
            "samples": trace.params.len(),
        });
        write_json(p, &artifact("geodesic", res, body))?;
    }
    Ok(())
}

pub fn inspect(a: InspectArgs, res: &mut Resolver) -> Result<(), Failure> {
    res.record("command", "inspect".into());
    let cfg = model(&a.model, res)?;
    let h_text: String = res.value("h", a.h, || "1e-3".to_string())?;
    let h = parse_h(&h_text)?;
    let x = [res.value("x1", a.x1, || 0.0)?, res.value("x2", a.x2, || 0.0)?];
    let t: f64 = res.value("t", a.t, || 0.0)?;
    if !(t.abs() < 0.5 * h) {
        return Err(Failure::Usage(format!("t = {t} is outside the shell: |t| < h/2 = {} required", 0.5 * h)));
    }
    let ansatz = cfg.ansatz(h)?;
    let region = ansatz.region();
    let inside = (0..2).all(|i| x[i] >= region.lo[i] && x[i] <= region.hi[i]) && region.in_support(x);
    if !inside {
        return Err(Failure::Usage(format!(
            "({}, {}) is outside the Ansatz region [{}, {}] × [{}, {}]",
            x[0], x[1], region.lo[0], region.hi[0], region.lo[1], region.hi[1]
        )));
    }
    let fields = ansatz.fields(x)?;
    let sample = fields.sample(t)?;
    let oracle = oracle_check(ansatz.as_ref(), x, t)?;
    let body = json!({
        "h": h,
        "frequency": ansatz.params().frequency(),
        "sample": sample,
        "oracle": { "differenced": oracle.differenced, "relative_error": oracle.relative_error },
    });
    let text = serde_json::to_string_pretty(&artifact("inspect", res, body)).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(a.output.as_deref(), &(text + "\n"))
}
