//! Acceptance criteria 1–10, one line each; exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shellrig::ansatz::{builtin_ansatz, oracle_check, AnsatzParams, Geometry, ALL_GEOMETRIES};
use shellrig::flows::{flat_geodesic, normal_variation, straightness_deviation, NetGeometry, PrincipalNet};
use shellrig::rigidity::evaluate_energies;
use shellrig::scaling::SweepConfig;
use shellrig::surface::{Chart, Cylinder};

const BIN: &str = env!("CARGO_BIN_EXE_shellrig");

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).expect("report written")).expect("valid JSON")
}

struct SweepRun {
    code: i32,
    seconds: f64,
    report: Value,
}

fn sweep(dir: &Path, g: Geometry) -> SweepRun {
    let json = dir.join(format!("{g}.json"));
    let csv = dir.join(format!("{g}.csv"));
    let alt = g.alternate_tau().to_string();
    let start = Instant::now();
    let (code, _, _) = run(&[
        "sweep",
        "--geometry",
        &g.to_string(),
        "--alt-tau",
        &alt,
        "-o",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    SweepRun { code, seconds: start.elapsed().as_secs_f64(), report: read_json(&json) }
}

fn slope_in(s: &SweepRun, lo: f64, hi: f64, budget: f64) -> Outcome {
    let slope = s.report["fit"]["slope"].as_f64().unwrap_or(f64::NAN);
    let h = &s.report["config"];
    let pass = s.code == 0 && slope >= lo && slope <= hi;
    Outcome {
        pass,
        detail: format!(
            "slope {slope:.4} in [{lo:.4}, {hi:.4}], h = {}..{}, {:.1}s (budget {budget}s)",
            h["h_max"].as_str().unwrap_or("?"),
            h["h_min"].as_str().unwrap_or("?"),
            s.seconds
        ),
    }
}

fn criterion_4(runs: &[(Geometry, SweepRun)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (g, s) in runs {
        let d = s.report["tau_check"]["difference"].as_f64().unwrap_or(f64::NAN);
        pass &= d < 0.05;
        parts.push(format!("{g} Δ = {d:.4}"));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn criterion_5(runs: &[(Geometry, SweepRun)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (g, s) in runs {
        let k = &s.report["korn"];
        let e = |key: &str| k[key].as_f64().unwrap_or(f64::NAN);
        match g {
            Geometry::Hyperbolic => {
                pass &= (e("grad_exponent") + 4.0 / 3.0).abs() <= 0.1 && e("sym_exponent").abs() <= 0.15;
                parts.push(format!("hyperbolic grad {:.4}, sym {:.4}", e("grad_exponent"), e("sym_exponent")));
            }
            Geometry::Parabolic => {
                pass &= (e("grad_exponent") + 1.5).abs() <= 0.1;
                parts.push(format!("parabolic grad {:.4}", e("grad_exponent")));
            }
            Geometry::Elliptic => {
                pass &= (e("korn_exponent") + 1.0).abs() <= 0.15;
                parts.push(format!("elliptic Korn ratio {:.4}", e("korn_exponent")));
            }
        }
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn criterion_6(dir: &Path) -> Outcome {
    let json = dir.join("lemmas.json");
    let (code, _, _) = run(&["lemmas", "--json", json.to_str().unwrap()]);
    let report = read_json(&json);
    let checks = report["checks"].as_array().cloned().unwrap_or_default();
    let worst = checks
        .iter()
        .filter(|c| !c["name"].as_str().unwrap_or("").contains("Proposition"))
        .map(|c| c["residual"].as_f64().unwrap_or(f64::NAN) / c["threshold"].as_f64().unwrap_or(f64::NAN))
        .fold(0.0f64, f64::max);
    let sandwich = checks.iter().find(|c| c["name"].as_str().unwrap_or("").starts_with("Lemma 2.4"));
    let sw_samples = sandwich.and_then(|c| c["samples"].as_u64()).unwrap_or(0);
    let sw_viol = sandwich.and_then(|c| c["violations"].as_u64()).unwrap_or(u64::MAX);
    let (strict_code, _, strict_err) = run(&["lemmas", "--threshold", "1e-16", "--samples", "50", "--matrices", "100"]);
    let pass = code == 0
        && checks.len() >= 15
        && checks.iter().all(|c| c["pass"].as_bool() == Some(true))
        && sw_samples >= 10_000
        && sw_viol == 0
        && strict_code == 1
        && strict_err.contains("Lemma 2.3");
    Outcome {
        pass,
        detail: format!(
            "{} checks, worst residual/threshold {worst:.1e}, sandwich {sw_viol} violations in {sw_samples}, strict run exit {strict_code}",
            checks.len()
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut straight = 0.0f64;
    let mut normal = 0.0f64;
    for x0 in [[0.0, 0.0], [0.3, 1.2], [-0.8, -2.0]] {
        let t = flat_geodesic(&Cylinder, x0, 1.0, 1000).and_then(|t| t.complete()).expect("geodesic");
        straight = straight.max(straightness_deviation(&t));
        normal = normal.max(normal_variation(&Cylinder, &t).expect("frames"));
    }
    let chart: std::sync::Arc<dyn Chart<f64>> = std::sync::Arc::new(Cylinder);
    let net = PrincipalNet::with_steps(chart.clone(), [0.0, 0.0], 0.8, 0.5, 64).expect("net");
    let mut comm = 0.0f64;
    for (t, s) in [(0.8, 0.5), (-0.8, 0.25), (0.4, -0.5), (-0.3, -0.3)] {
        let a = net.chart_coords([t, s]).expect("γ∘β");
        let b = net.transversal_flow(t, s, 64).expect("β∘γ");
        comm = comm.max((chart.position(a) - chart.position(b)).norm());
    }
    Outcome {
        pass: straight < 1e-8 && normal < 1e-8 && comm < 1e-8,
        detail: format!("straightness {straight:.1e}, |∇ν| {normal:.1e}, commutation {comm:.1e}"),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut parts = Vec::new();
    let mut pass = true;
    for g in ALL_GEOMETRIES {
        let h = 1e-3;
        let a = builtin_ansatz::<f64>(g.default_chart(), AnsatzParams::new(g, h)).expect("ansatz");
        let r = a.region();
        let p = a.params();
        let margin = 4.0 * 1e-3 / p.frequency().max(1.0);
        let (level, breaks): (fn([f64; 2]) -> f64, [f64; 2]) = match g {
            Geometry::Parabolic => (|x| x[1].abs(), [0.5 * p.epsilon, p.epsilon]),
            _ => (|x| x[0].hypot(x[1]), [p.delta, 2.0 * p.delta]),
        };
        let mut worst = 0.0f64;
        let mut n = 0;
        let mut skipped = 0;
        while n < 1000 {
            let x = [rng.gen_range(r.lo[0]..r.hi[0]), rng.gen_range(r.lo[1]..r.hi[1])];
            if !r.in_support(x) {
                continue;
            }
            if breaks.iter().any(|b| (level(x) - b).abs() < margin) {
                skipped += 1;
                continue;
            }
            let t = rng.gen_range(-0.5 * h..0.5 * h);
            worst = worst.max(oracle_check(a.as_ref(), x, t).expect("oracle").relative_error);
            n += 1;
        }
        pass &= worst < 1e-6;
        parts.push(format!("{g} {worst:.1e} ({skipped} skipped at cutoff seams)"));
    }
    Outcome { pass, detail: format!("max relative error over 10³ points: {}", parts.join(", ")) }
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for g in ALL_GEOMETRIES {
        let cfg = SweepConfig::new(g);
        let h = *cfg.hs.last().unwrap();
        let a = cfg.ansatz(h).expect("ansatz");
        let base = evaluate_energies(a.as_ref(), &cfg.grid()).expect("energies");
        let fine = evaluate_energies(a.as_ref(), &SweepConfig { refine: 2, ..cfg.clone() }.grid()).expect("energies");
        let rel = [
            (base.e_grad, fine.e_grad),
            (base.e_sym, fine.e_sym),
            (base.e_defgrad, fine.e_defgrad),
            (base.e_dist, fine.e_dist),
        ]
        .iter()
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0f64, f64::max);
        worst = worst.max(rel);
        parts.push(format!("{g} {rel:.1e}"));
    }
    Outcome { pass: worst < 0.02, detail: format!("largest relative change at the smallest h: {}", parts.join(", ")) }
}

fn criterion_10(dir: &Path) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for g in ALL_GEOMETRIES {
        let mut files = Vec::new();
        for (k, threads) in ["1", "4", "1"].iter().enumerate() {
            let p = dir.join(format!("det-{g}-{k}.csv"));
            let (code, _, _) = run(&["--threads", threads, "sweep", "--geometry", &g.to_string(), "-o", p.to_str().unwrap()]);
            pass &= code == 0;
            files.push(std::fs::read(&p).unwrap_or_default());
        }
        let same = !files[0].is_empty() && files.iter().all(|f| *f == files[0]);
        pass &= same;
        parts.push(format!("{g} {}", if same { "identical" } else { "DIFFERENT" }));
    }
    Outcome { pass, detail: format!("CSV bytes across runs and 1/4 threads: {}", parts.join(", ")) }
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    let runs: Vec<(Geometry, SweepRun)> = ALL_GEOMETRIES.iter().map(|&g| (g, sweep(dir.path(), g))).collect();
    let by = |g: Geometry| &runs.iter().find(|(x, _)| *x == g).unwrap().1;
    results.push((1, "hyperbolic exponent 4/3", slope_in(by(Geometry::Hyperbolic), 4.0 / 3.0 - 0.1, 4.0 / 3.0 + 0.1, 600.0)));
    results.push((2, "parabolic exponent 3/2", slope_in(by(Geometry::Parabolic), 1.4, 1.6, 600.0)));
    results.push((3, "elliptic exponent 1", slope_in(by(Geometry::Elliptic), 0.9, 1.1, 900.0)));
    results.push((4, "τ-independence", criterion_4(&runs)));
    results.push((5, "Korn scaling", criterion_5(&runs)));
    results.push((6, "identity suite", criterion_6(dir.path())));
    results.push((7, "flat geodesics and net commutation", criterion_7()));
    results.push((8, "gradient assembly oracle", criterion_8()));
    results.push((9, "grid convergence", criterion_9()));
    results.push((10, "determinism", criterion_10(dir.path())));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("criterion {n:>2} {:<4} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
