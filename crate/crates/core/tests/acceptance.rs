mod common;

use common::*;
use curvkit::catalog::{builtin_metrics, lookup};
use curvkit::classifier::{
    aggregate, identity_report, identity_suite, sample_points, Causal, FindingStatus, SamplingConfig, SEMISYMMETRY,
};
use curvkit::cli::{run, EXIT_FINDINGS, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use curvkit::dsl::parse_metric_file;
use curvkit::invariants::{scalar_invariants, InvariantValue, Tolerances};
use curvkit::jets::UnaryFn;
use curvkit::output::to_json;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg(points: usize, order: usize) -> SamplingConfig {
    SamplingConfig { points, order, ..Default::default() }
}

fn check(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn jet_engine() -> Outcome {
    const POINTS: [[f64; 3]; 4] = [[0.3, -0.4, 0.7], [-0.6, 0.5, -0.2], [0.05, 0.75, 0.4], [0.8, -0.8, 0.8]];
    let mut failures = Vec::new();
    let mut fd = 0.0f64;
    for src in JET_CORPUS {
        for p in &POINTS {
            let w = fd_worst(src, p);
            fd = fd.max(w);
            if w > 1e-5 {
                failures.push(format!("fd {src} at {p:?}: {w:e}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut rule = 0.0f64;
    for _ in 0..200 {
        let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let f = jet(&parse(JET_CORPUS[rng.gen_range(0..20)]), &p, 3);
        let g = jet(&parse(JET_CORPUS[rng.gen_range(0..20)]), &p, 3);
        let i = rng.gen_range(0..3);
        let outer = [UnaryFn::Sin, UnaryFn::Exp, UnaryFn::Tanh][rng.gen_range(0..3)];
        rule = rule.max(leibniz_residual(&f, &g, i)).max(chain_residual(&f, outer, i));
    }
    if rule > 1e-12 {
        failures.push(format!("Leibniz/chain residual {rule:e}"));
    }
    check(failures, format!("fd worst {fd:.2e} (tol 1e-5), Leibniz/chain worst {rule:.2e} (tol 1e-12)"))
}

fn curvature_oracles() -> Outcome {
    let mut failures = Vec::new();
    let sphere = lookup("sphere-unit").unwrap().spec;
    let mut sphere_err = 0.0f64;
    for p in sample_points(&sphere, &cfg(10, 4)) {
        let (_, pv) = curvature(&sphere, &p, 4, 2);
        sphere_err = sphere_err.max((pv.scalar - 2.0).abs());
    }
    if sphere_err > 1e-9 {
        failures.push(format!("sphere R error {sphere_err:e}"));
    }
    let schw = lookup("schwarzschild").unwrap().spec;
    let (mut ricci, mut kret) = (0.0f64, 0.0f64);
    for p in sample_points(&schw, &cfg(10, 4)) {
        let (_, pv) = curvature(&schw, &p, 4, 2);
        ricci = ricci.max(pv.ricci.max_abs() / pv.factor(&pv.ricci, 0));
        let want = 48.0 / p[1].powi(6);
        let k = scalar_invariants(&pv, Tolerances::default()).get("kretschmann").unwrap().value.max_abs();
        kret = kret.max((k - want).abs() / want);
    }
    if ricci > 1e-10 {
        failures.push(format!("Schwarzschild Ricci {ricci:e}·scale"));
    }
    if kret > 1e-9 {
        failures.push(format!("Kretschmann relative error {kret:e}"));
    }
    check(
        failures,
        format!("sphere |R−2| {sphere_err:.2e}, Ricci {ricci:.2e}·scale, Kretschmann rel {kret:.2e}"),
    )
}

fn recomposition_and_bianchi() -> Outcome {
    let mut failures = Vec::new();
    let (mut rec, mut bianchi, mut entries) = (0.0f64, 0.0f64, 0);
    for e in builtin_metrics() {
        entries += 1;
        for p in sample_points(&e.spec, &cfg(5, 4)) {
            let (_, pv) = curvature(&e.spec, &p, 4, 2);
            let s0 = pv.factor(&pv.riem, 0).max(pv.frame_scale);
            let r = recomposition_residual(&pv) / s0;
            let b = second_bianchi_residual(&pv) / pv.derivative_scale(1);
            rec = rec.max(r);
            bianchi = bianchi.max(b);
            if r > 1e-11 || b > 1e-10 {
                failures.push(format!("{} at {p:?}: recomposition {r:e}, Bianchi {b:e}", e.name));
            }
        }
    }
    check(failures, format!("{entries} entries, recomposition {rec:.2e}·scale, Bianchi {bianchi:.2e}·scale"))
}

fn hierarchy_regression() -> Outcome {
    let mut failures = Vec::new();
    for (name, symmetric, two_symmetric, three_symmetric) in [
        ("plane-wave-constant", true, true, true),
        ("plane-wave-linear", false, true, true),
        ("plane-wave-quadratic", false, false, true),
    ] {
        let r = aggregate(&lookup(name).unwrap().spec, &cfg(20, 5)).unwrap();
        let a = &r.aggregate;
        let k3 = a.k_symmetric.iter().find(|k| k.k == 3).map(|k| k.holds);
        if a.points_evaluated != 20 || a.symmetric != symmetric || a.two_symmetric != two_symmetric || k3 != Some(three_symmetric) {
            failures.push(format!("{name}: symmetric {} 2-symmetric {} 3-symmetric {k3:?}", a.symmetric, a.two_symmetric));
        }
    }
    let mut points = 0;
    for e in builtin_metrics() {
        let r = aggregate(&e.spec, &cfg(20, e.min_order)).unwrap();
        for p in &r.points {
            points += 1;
            let c = &p.classification;
            let chain = c.hierarchy();
            let higher = c.k_symmetric.iter().filter(|k| k.k >= 2).all(|k| k.verdict.holds);
            if !chain.windows(2).all(|w| !w[0] || w[1]) || (c.two_symmetric.holds && !higher) {
                failures.push(format!("{} point {}: {chain:?}", e.name, p.index));
            }
        }
    }
    check(failures, format!("degrees 0/1/2 classified at 20 points; chain monotone at {points} catalog points"))
}

fn identity_suite_check() -> Outcome {
    let mut failures = Vec::new();
    let spec = lookup("plane-wave-linear").unwrap().spec;
    let mut worst = 0.0f64;
    for p in sample_points(&spec, &cfg(20, 4)) {
        let (_, pv) = curvature(&spec, &p, 4, 2);
        for r in identity_suite(&pv, Tolerances::default()) {
            let ratio = r.residual / r.scale.max(f64::MIN_POSITIVE);
            worst = worst.max(ratio);
            if r.residual > 1e-9 * r.scale {
                failures.push(format!("{} at {p:?}: {:e} / {:e}", r.name, r.residual, r.scale));
            }
        }
    }
    let schw = lookup("schwarzschild").unwrap().spec;
    let forced = identity_report(&schw, &cfg(20, 4), true).unwrap();
    let semi_fails_everywhere = forced
        .points
        .iter()
        .all(|p| p.results.iter().any(|r| r.name == SEMISYMMETRY && !r.pass));
    if !forced.failing.iter().any(|n| n == SEMISYMMETRY) || !semi_fails_everywhere {
        failures.push(format!("Schwarzschild forced run did not fail semisymmetry: {:?}", forced.failing));
    }
    let control = forced.worst(SEMISYMMETRY).map_or(0.0, |r| r.residual / r.scale);
    check(failures, format!("plane wave worst {worst:.2e}·scale (tol 1e-9); Schwarzschild semisymmetry {control:.2e}·scale"))
}

fn theorem_consistency_check() -> Outcome {
    let mut failures = Vec::new();
    let mut passes = 0;
    for e in builtin_metrics() {
        let r = aggregate(&e.spec, &cfg(20, e.min_order)).unwrap();
        for f in r.consistency.iter().filter(|f| matches!(f.id, "a" | "b" | "e")) {
            match f.status {
                FindingStatus::Fail => failures.push(format!("{} finding {}: {:?}", e.name, f.id, f.witness)),
                FindingStatus::Pass => passes += 1,
                FindingStatus::NotApplicable => {}
            }
        }
    }
    let r = aggregate(&lookup("plane-wave-linear").unwrap().spec, &cfg(20, 4)).unwrap();
    for p in &r.points {
        let h = &p.holonomy;
        let ok = h.kernel_dim() == 1
            && h.tangent_kernel[0].causal == Causal::Null
            && (h.tangent_kernel[0].components[1].abs() - 1.0).abs() < 1e-9;
        if !ok {
            failures.push(format!("plane-wave kernel at point {}: {:?}", p.index, h.tangent_kernel));
        }
    }
    check(failures, format!("findings a/b/e: {passes} pass, none fail; plane-wave kernel span(∂_v), null"))
}

fn invariant_vanishing() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let waves = builtin_metrics().into_iter().filter(|e| e.name.starts_with("plane-wave") && !e.name.contains("-x-"));
    for e in waves {
        for p in sample_points(&e.spec, &cfg(20, 4)) {
            let (_, pv) = curvature(&e.spec, &p, 4, 2);
            let inv = scalar_invariants(&pv, Tolerances::default());
            for i in inv.entries.iter().filter(|i| !matches!(i.value, InvariantValue::Matrix(_))) {
                let ratio = i.value.max_abs() / i.scale.max(1.0);
                worst = worst.max(ratio);
                if ratio > 1e-10 {
                    failures.push(format!("{} {} = {:e}", e.name, i.name, i.value.max_abs()));
                }
            }
        }
    }
    let schw = lookup("schwarzschild").unwrap().spec;
    for p in sample_points(&schw, &cfg(20, 4)) {
        let (_, pv) = curvature(&schw, &p, 4, 2);
        let inv = scalar_invariants(&pv, Tolerances::default());
        for name in ["kretschmann", "kretschmann_gradient_squared"] {
            if inv.get(name).unwrap().zero {
                failures.push(format!("Schwarzschild {name} zero at {p:?}"));
            }
        }
    }
    check(failures, format!("plane waves worst {worst:.2e}·scale (tol 1e-10); Schwarzschild K, |∇K|² nonzero"))
}

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("curvkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut std::io::sink());
    (code, String::from_utf8(out).unwrap())
}

fn determinism_and_interfaces() -> Outcome {
    let mut failures = Vec::new();
    let args = ["classify", "catalog:plane-wave-linear-x-sphere", "--json", "--seed", "11"];
    if call(&args).1 != call(&args).1 {
        failures.push("CLI JSON differs between runs".into());
    }
    let spec = lookup("schwarzschild").unwrap().spec;
    if to_json(&aggregate(&spec, &cfg(8, 4)).unwrap()) != to_json(&aggregate(&spec, &cfg(8, 4)).unwrap()) {
        failures.push("library JSON differs between runs".into());
    }
    let entries = builtin_metrics();
    for e in &entries {
        let text = e.spec.to_file_string();
        match parse_metric_file(&text) {
            Ok(back) if back == e.spec && back.to_file_string() == text => {}
            _ => failures.push(format!("{} does not round-trip", e.name)),
        }
    }
    let codes = [
        (call(&["classify", "catalog:sphere-unit", "--points", "4"]).0, EXIT_OK),
        (call(&["identities", "catalog:schwarzschild", "--force", "--points", "3"]).0, EXIT_FINDINGS),
        (call(&["classify", "catalog:no-such-entry"]).0, EXIT_USAGE),
        (call(&["classify", "catalog:sphere-unit", "--order", "3"]).0, EXIT_NUMERIC),
    ];
    for (got, want) in codes {
        if got != want {
            failures.push(format!("exit code {got}, expected {want}"));
        }
    }
    check(failures, format!("JSON byte-identical; {} entries round-trip; exit codes 0/1/2/3", entries.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("jet engine", jet_engine),
        ("curvature oracles", curvature_oracles),
        ("recomposition and second Bianchi", recomposition_and_bianchi),
        ("hierarchy regression", hierarchy_regression),
        ("identity suite", identity_suite_check),
        ("theorem consistency", theorem_consistency_check),
        ("invariant vanishing", invariant_vanishing),
        ("determinism and interfaces", determinism_and_interfaces),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
