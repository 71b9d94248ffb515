#![allow(dead_code)]

use curvkit::curvature::{cov_derivative, recompose_riemann};
use curvkit::dsl::{eval_expression, eval_value, Expr, MetricSpec};
use curvkit::geometry::{PointCurvature, PointValues};
use curvkit::jets::{Jet, UnaryFn};
use curvkit::tensor::Tensor;

/// Expressions in `x, y, z`, all smooth on `[-0.8, 0.8]³`.
pub const JET_CORPUS: [&str; 20] = [
    "x*y*z",
    "sin(x)*cos(y)",
    "exp(x + 2*y - z)",
    "log(2 + x*y)",
    "sqrt(3 + x^2 + y^2)",
    "1/(2 + x - y*z)",
    "tan(x*y + z/2)",
    "sinh(x)*cosh(z)",
    "tanh(x - y + z)",
    "(x^2 + y^2)^3",
    "x^5 - 3*x*y^4 + z^3",
    "exp(-x^2)*sin(3*y)",
    "cos(x*y*z)^2",
    "log(cosh(x + y))",
    "sqrt(exp(x) + y^2)",
    "1/(1 + x)^3",
    "sin(exp(y))*z",
    "x/(1 + y^2 + z^2)",
    "exp(sin(x)*cos(z))",
    "tanh(x)^2*log(3 + z)",
];

pub fn xyz_spec() -> MetricSpec {
    MetricSpec {
        name: "xyz".into(),
        coords: vec!["x".into(), "y".into(), "z".into()],
        params: Vec::new(),
        components: Default::default(),
        domain: vec![(-0.8, 0.8); 3],
    }
}

pub fn parse(src: &str) -> Expr {
    xyz_spec().parse_expr(src).unwrap()
}

pub fn jet(expr: &Expr, point: &[f64], order: usize) -> Jet {
    eval_expression(expr, &xyz_spec(), point, order).unwrap()
}

/// Every multi-index of total degree `1..=max` in three variables.
pub fn multi_indices(max: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max - a {
            for c in 0..=max - a - b {
                if a + b + c > 0 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// `∂^α f` by a five-point central difference in the first active variable,
/// applied to `∂^{α − e_i} f`. For `|α| = 1` the inner function is plain
/// floating-point evaluation, independent of the jet code.
pub fn fd_derivative(expr: &Expr, point: &[f64], alpha: [u8; 3], h: f64) -> f64 {
    let i = alpha.iter().position(|&a| a > 0).unwrap();
    let mut beta = alpha;
    beta[i] -= 1;
    let inner_order = beta.iter().map(|&b| b as usize).sum::<usize>();
    let inner = |t: f64| {
        let mut p = point.to_vec();
        p[i] += t;
        if inner_order == 0 {
            eval_value(expr, &p, &[])
        } else {
            jet(expr, &p, inner_order).derivative(&beta)
        }
    };
    (-inner(2.0 * h) + 8.0 * inner(h) - 8.0 * inner(-h) + inner(-2.0 * h)) / (12.0 * h)
}

/// Largest `|jet − fd| / max(|jet|, m_k)` over derivatives up to order 3,
/// where `m_k` is the largest order-`k` derivative magnitude of the
/// expression at the point. An order whose derivatives all vanish falls back
/// to the largest magnitude over all orders.
pub fn fd_worst(src: &str, point: &[f64]) -> f64 {
    let expr = parse(src);
    let j = jet(&expr, point, 3);
    let alphas = multi_indices(3);
    let degree = |a: &[u8; 3]| a.iter().map(|&x| x as usize).sum::<usize>();
    let mut scale = [0.0f64; 4];
    for a in &alphas {
        let k = degree(a);
        scale[k] = scale[k].max(j.derivative(a).abs());
    }
    let overall = scale.iter().copied().fold(0.0, f64::max);
    for s in &mut scale {
        if *s == 0.0 {
            *s = overall;
        }
    }
    alphas
        .iter()
        .map(|a| {
            let exact = j.derivative(a);
            let fd = fd_derivative(&expr, point, *a, 1e-3);
            (exact - fd).abs() / exact.abs().max(scale[degree(a)]).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// `max |a − b|` over `scale`, floored so exact zeros compare as zero.
fn rel_diff(a: &Jet, b: &Jet, scale: f64) -> f64 {
    let d = a.try_sub(b).unwrap().max_abs();
    d / scale.max(a.max_abs()).max(b.max_abs()).max(1e-300)
}

/// `∂_i(fg)` against `∂_i f · g + f · ∂_i g`, as order-2 jets.
pub fn leibniz_residual(f: &Jet, g: &Jet, i: usize) -> f64 {
    let lhs = f.try_mul(g).unwrap().partial(i).unwrap();
    let fd = f.partial(i).unwrap();
    let gd = g.partial(i).unwrap();
    let order = lhs.order();
    let rhs = fd
        .try_mul(&g.truncate(order))
        .unwrap()
        .try_add(&f.truncate(order).try_mul(&gd).unwrap())
        .unwrap();
    let scale = fd.max_abs() * g.max_abs() + f.max_abs() * gd.max_abs();
    rel_diff(&lhs, &rhs, scale)
}

/// `∂_i F(f)` against `F'(f) ∂_i f` for `F ∈ {sin, exp, tanh}`.
pub fn chain_residual(f: &Jet, outer: UnaryFn, i: usize) -> f64 {
    let lhs = f.apply(outer).unwrap().partial(i).unwrap();
    let order = lhs.order();
    let ft = f.truncate(order);
    let deriv = match outer {
        UnaryFn::Sin => ft.apply(UnaryFn::Cos).unwrap(),
        UnaryFn::Exp => ft.apply(UnaryFn::Exp).unwrap(),
        UnaryFn::Tanh => ft.apply(UnaryFn::Cosh).unwrap().powi(-2).unwrap(),
        other => panic!("no derivative rule for {other}"),
    };
    let fi = f.partial(i).unwrap();
    let rhs = deriv.try_mul(&fi).unwrap();
    rel_diff(&lhs, &rhs, deriv.max_abs() * fi.max_abs())
}

pub fn curvature(spec: &MetricSpec, point: &[f64], order: usize, depth: usize) -> (PointCurvature, PointValues) {
    let pc = PointCurvature::at(spec, point, order, depth).unwrap();
    let pv = PointValues::new(&pc).unwrap();
    (pc, pv)
}

/// `max |R_{αβγδ} − R_{γδαβ}|`, pair antisymmetries and the cyclic sum.
pub fn algebraic_symmetry_residual(pv: &PointValues) -> f64 {
    let n = pv.n;
    let r = &pv.riem;
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = r.get([a, b, c, d]);
                    worst = worst
                        .max((v + r.get([b, a, c, d])).abs())
                        .max((v + r.get([a, b, d, c])).abs())
                        .max((v - r.get([c, d, a, b])).abs())
                        .max((v + r.get([a, c, d, b]) + r.get([a, d, b, c])).abs());
                }
            }
        }
    }
    worst
}

/// `max |∇_ε R^α_{βγδ} + ∇_γ R^α_{βδε} + ∇_δ R^α_{βεγ}|`.
pub fn second_bianchi_residual(pv: &PointValues) -> f64 {
    let n = pv.n;
    let t = &pv.d_riem_mixed;
    let mut worst = 0.0f64;
    for e in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = t.get([e, a, b, c, d]) + t.get([c, a, b, d, e]) + t.get([d, a, b, e, c]);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
    }
    worst
}

/// `[∇_ζ, ∇_ε] R^α_{βγδ}` against the curvature action on each slot.
pub fn ricci_identity_residual(pv: &PointValues) -> f64 {
    let n = pv.n;
    let dd = &pv.dd_riem_mixed;
    let r = &pv.riem_mixed;
    let mut worst = 0.0f64;
    for z in 0..n {
        for e in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let lhs = dd.get([z, e, a, b, c, d]) - dd.get([e, z, a, b, c, d]);
                            let mut rhs = 0.0;
                            for p in 0..n {
                                rhs += r.get([a, p, z, e]) * r.get([p, b, c, d])
                                    - r.get([p, b, z, e]) * r.get([a, p, c, d])
                                    - r.get([p, c, z, e]) * r.get([a, b, p, d])
                                    - r.get([p, d, z, e]) * r.get([a, b, c, p]);
                            }
                            worst = worst.max((lhs - rhs).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Riemann rebuilt from Weyl, Ricci and scalar against Riemann itself.
pub fn recomposition_residual(pv: &PointValues) -> f64 {
    recompose_riemann(&pv.weyl, &pv.ricci, pv.scalar, &pv.g).max_diff(&pv.riem)
}

/// `max |∇_ε g_{αβ}|`.
pub fn metric_compatibility_residual(pc: &PointCurvature) -> f64 {
    cov_derivative(&pc.frame.g, &pc.frame).unwrap().values().max_abs()
}

/// Largest trace of the Weyl tensor, `C^ρ_{αρβ}`.
pub fn weyl_trace(pv: &PointValues) -> f64 {
    let n = pv.n;
    Tensor::from_fn(n, |[a, b]| (0..n).map(|r| pv.weyl_mixed.get([r, a, r, b])).sum()).max_abs()
}
