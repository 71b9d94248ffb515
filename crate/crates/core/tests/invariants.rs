mod common;

use common::curvature;
use curvkit::catalog::{builtin_metrics, lookup};
use curvkit::classifier::{sample_points, SamplingConfig};
use curvkit::invariants::{scalar_invariants, InvariantValue, Tolerances};

fn scalar(v: &InvariantValue) -> f64 {
    match v {
        InvariantValue::Scalar(x) => *x,
        other => panic!("not a scalar: {other:?}"),
    }
}

#[test]
fn scalar_and_one_form_invariants_vanish_on_plane_waves() {
    let mut checked = 0;
    for e in builtin_metrics().into_iter().filter(|e| e.name.starts_with("plane-wave") && !e.name.contains("-x-")) {
        for p in sample_points(&e.spec, &SamplingConfig { points: 10, ..Default::default() }) {
            let (_, pv) = curvature(&e.spec, &p, 4, 2);
            let report = scalar_invariants(&pv, Tolerances::default());
            for inv in report.entries.iter().filter(|i| !matches!(i.value, InvariantValue::Matrix(_))) {
                assert!(
                    inv.value.max_abs() <= 1e-10 * inv.scale.max(1.0),
                    "{} {} = {:?} (scale {:e})",
                    e.name,
                    inv.name,
                    inv.value,
                    inv.scale
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn schwarzschild_invariants_match_closed_forms() {
    let spec = lookup("schwarzschild").unwrap().spec;
    for p in sample_points(&spec, &SamplingConfig { points: 10, seed: 3, ..Default::default() }) {
        let r = p[1];
        let (_, pv) = curvature(&spec, &p, 4, 2);
        let inv = scalar_invariants(&pv, Tolerances::default());
        let k = 48.0 / r.powi(6);
        // |∇K|² = g^{rr} (∂_r K)², ∂_r K = −288/r⁷
        let dk2 = (1.0 - 2.0 / r) * (288.0 / r.powi(7)).powi(2);
        let get = |name: &str| scalar(&inv.get(name).unwrap().value);
        assert!((get("kretschmann") - k).abs() <= 1e-9 * k);
        assert!((get("weyl_squared") - k).abs() <= 1e-9 * k);
        assert!((get("kretschmann_gradient_squared") - dk2).abs() <= 1e-9 * dk2, "{} vs {dk2}", get("kretschmann_gradient_squared"));
        assert!(get("ricci_squared").abs() <= 1e-12 * k);
        assert!(!inv.get("kretschmann").unwrap().zero);
        let g = inv.get("kretschmann_gradient_squared").unwrap();
        assert!(!g.zero, "r = {r}: {:?} scale {:e}", g.value, g.scale);
        assert!(!inv.get("riemann_grad_riemann").unwrap().zero);
    }
}

#[test]
fn product_invariants_split_over_factors() {
    // M² × S²: Kretschmann of the unit sphere (4) and R = 2
    let spec = lookup("minkowski2-x-sphere").unwrap().spec;
    let (_, pv) = curvature(&spec, &[0.1, 0.2, 1.3, 0.4], 4, 2);
    let inv = scalar_invariants(&pv, Tolerances::default());
    assert!((scalar(&inv.get("kretschmann").unwrap().value) - 4.0).abs() < 1e-12);
    assert!((scalar(&inv.get("scalar_curvature").unwrap().value) - 2.0).abs() < 1e-12);
    assert!((scalar(&inv.get("ricci_squared").unwrap().value) - 2.0).abs() < 1e-12);
    assert!(inv.order_one_zero());
}
