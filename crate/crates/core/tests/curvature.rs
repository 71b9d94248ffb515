mod common;

use common::*;
use curvkit::catalog::{builtin_metrics, lookup};
use curvkit::classifier::{sample_points, SamplingConfig};
use curvkit::dsl::parse_metric_file;
use curvkit::invariants::{scalar_invariants, Tolerances};
use proptest::prelude::*;

fn points(name: &str, count: usize) -> Vec<Vec<f64>> {
    let spec = lookup(name).unwrap().spec;
    sample_points(&spec, &SamplingConfig { points: count, ..Default::default() })
}

#[test]
fn constant_curvature_scalars() {
    // R = n(n−1)K
    for (name, expected) in [("sphere-unit", 2.0), ("sphere-radius-2", 0.5), ("hyperbolic-plane", -2.0), ("de-sitter", 12.0)] {
        let spec = lookup(name).unwrap().spec;
        for p in points(name, 5) {
            let (_, pv) = curvature(&spec, &p, 4, 2);
            assert!((pv.scalar - expected).abs() <= 1e-9, "{name}: {}", pv.scalar);
        }
    }
}

#[test]
fn schwarzschild_is_ricci_flat_with_known_kretschmann() {
    let spec = lookup("schwarzschild").unwrap().spec;
    for p in points("schwarzschild", 10) {
        let (_, pv) = curvature(&spec, &p, 4, 2);
        let scale = pv.factor(&pv.ricci, 0);
        assert!(pv.ricci.max_abs() <= 1e-10 * scale, "{p:?}");
        let r = p[1];
        let want = 48.0 / r.powi(6);
        let inv = scalar_invariants(&pv, Tolerances::default());
        let k = inv.get("kretschmann").unwrap().value.max_abs();
        assert!((k - want).abs() <= 1e-9 * want, "r = {r}: {k} vs {want}");
    }
}

#[test]
fn sphere_connection_matches_closed_form() {
    let spec = lookup("sphere-unit").unwrap().spec;
    let th: f64 = 1.1;
    let (pc, pv) = curvature(&spec, &[th, 0.3], 4, 2);
    let gamma = pc.frame.christoffel.values();
    // Γ^θ_φφ = −sin θ cos θ, Γ^φ_θφ = cot θ
    assert!((gamma.get([0, 1, 1]) + th.sin() * th.cos()).abs() < 1e-13);
    assert!((gamma.get([1, 0, 1]) - th.cos() / th.sin()).abs() < 1e-13);
    // R^θ_φθφ = sin²θ
    assert!((pv.riem_mixed.get([0, 1, 0, 1]) - th.sin().powi(2)).abs() < 1e-13);
}

#[test]
fn tensor_identities_on_the_catalog() {
    let mut failures = Vec::new();
    for e in builtin_metrics() {
        let cfg = SamplingConfig { points: 3, ..Default::default() };
        for p in sample_points(&e.spec, &cfg) {
            let (pc, pv) = curvature(&e.spec, &p, 4, 2);
            let s0 = pv.factor(&pv.riem, 0).max(pv.frame_scale);
            let s1 = pv.derivative_scale(1);
            let s2 = pv.derivative_scale(2);
            let checks = [
                ("algebraic symmetries", algebraic_symmetry_residual(&pv), s0, 1e-11),
                ("second Bianchi", second_bianchi_residual(&pv), s1, 1e-10),
                ("Ricci identity", ricci_identity_residual(&pv), s2.max(s0 * s0), 1e-10),
                ("recomposition", recomposition_residual(&pv), s0, 1e-11),
                ("Weyl trace", weyl_trace(&pv), s0, 1e-11),
                ("metric compatibility", metric_compatibility_residual(&pc), pv.christoffel_scale.max(1.0), 1e-12),
            ];
            for (what, res, scale, tol) in checks {
                if res > tol * scale {
                    failures.push(format!("{} {what} at {p:?}: {res:e} (scale {scale:e})", e.name));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn plane_wave_riemann_follows_the_profile() {
    // H = ½A_ij x^i x^j gives R_{uiuj} = A_ij(u) and ∇_u^k R_{uiuj} = A_ij^{(k)}(u)
    for (name, a, da, dda) in [
        ("plane-wave-constant", [1.0, -1.0], [0.0, 0.0], [0.0, 0.0]),
        ("plane-wave-linear", [1.0, -1.0], [1.0, -1.0], [0.0, 0.0]),
        ("plane-wave-quadratic", [1.0, -1.0], [2.0, -2.0], [2.0, -2.0]),
    ] {
        let spec = lookup(name).unwrap().spec;
        let u = 0.7;
        let power = match name {
            "plane-wave-constant" => 0,
            "plane-wave-linear" => 1,
            _ => 2,
        };
        let p = [u, -0.3, 0.4, 0.9];
        let (_, pv) = curvature(&spec, &p, 5, 3);
        for i in 0..2 {
            let x = 2 + i;
            let value = a[i] * u.powi(power);
            let first = if power == 0 { 0.0 } else { da[i] * u.powi(power - 1) };
            let second = if power < 2 { 0.0 } else { dda[i] };
            assert!((pv.riem.get([0, x, 0, x]) - value).abs() < 1e-12, "{name}");
            assert!((pv.d_riem.get([0, 0, x, 0, x]) - first).abs() < 1e-12, "{name}");
            let dd = pv.dd_riem_mixed.get([0, 0, 1, x, 0, x]);
            // R^v_{xux} = −R_{uxux} since g^{vu} = −1
            assert!((dd + second).abs() < 1e-11, "{name}: {dd}");
        }
        assert!(pv.riem.get([0, 2, 0, 3]).abs() < 1e-14);
    }
}

#[test]
fn curvature_of_a_rescaled_sphere_scales_inversely() {
    let base = lookup("sphere-unit").unwrap().spec;
    let big = lookup("sphere-radius-2").unwrap().spec;
    let (_, a) = curvature(&base, &[1.0, 0.2], 4, 2);
    let (_, b) = curvature(&big, &[1.0, 0.2], 4, 2);
    assert!((a.scalar - 4.0 * b.scalar).abs() < 1e-12);
    // R^α_{βγδ} is scale invariant
    assert!(a.riem_mixed.max_diff(&b.riem_mixed) < 1e-12);
}

fn random_metric_text(c: &[f64]) -> String {
    format!(
        "version = 1\nname = random\ndim = 3\ncoords = t x y\n\
         g 0 0 = \"-1 - {a}*x^2 + {b}*t*y\"\n\
         g 0 1 = \"{c}*sin(y)\"\n\
         g 1 1 = \"1 + {d}*exp(t)*y^2\"\n\
         g 1 2 = \"{e}*x*t\"\n\
         g 2 2 = \"1 + {f}*cos(x + t)\"\n",
        a = c[0], b = c[1], c = c[2], d = c[3], e = c[4], f = c[5]
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_for_random_metrics(
        c in proptest::collection::vec(-0.2f64..0.2, 6),
        p in proptest::collection::vec(-0.5f64..0.5, 3),
    ) {
        let spec = parse_metric_file(&random_metric_text(&c)).unwrap();
        let (pc, pv) = curvature(&spec, &p, 4, 2);
        let s0 = pv.factor(&pv.riem, 0).max(pv.frame_scale);
        prop_assert!(algebraic_symmetry_residual(&pv) <= 1e-11 * s0);
        prop_assert!(second_bianchi_residual(&pv) <= 1e-10 * pv.derivative_scale(1));
        prop_assert!(ricci_identity_residual(&pv) <= 1e-10 * pv.derivative_scale(2).max(s0 * s0));
        prop_assert!(recomposition_residual(&pv) <= 1e-11 * s0);
        prop_assert!(weyl_trace(&pv) <= 1e-11 * s0);
        prop_assert!(metric_compatibility_residual(&pc) <= 1e-12 * pv.christoffel_scale.max(1.0));
    }
}
