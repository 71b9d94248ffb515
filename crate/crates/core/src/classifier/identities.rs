//! Quadratic identities satisfied by 2-symmetric (and, for some of them,
//! semisymmetric) metrics, evaluated as residuals at a point.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::geometry::PointValues;
use crate::invariants::Tolerances;
use crate::tensor::{unflatten, Tensor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

/// Name of the curvature-commutator identity that characterizes semisymmetry.
pub const SEMISYMMETRY: &str = "riemann_semisymmetry";

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `out[X, i_1..i_q] = Σ_k Σ_ρ e[X, ρ, i_k] t[i_1..ρ..i_q]`, the action of the
/// endomorphism family `e^ρ_{a X}` (stored as `[X.., ρ, a]`) as a derivation
/// on all slots of `t`.
fn derivation(e: &Tensor, t: &Tensor) -> Vec<f64> {
    let n = t.n();
    let q = t.rank();
    let x = e.rank() - 2;
    let nx = n.pow(x as u32);
    let nt = n.pow(q as u32);
    let ed = e.data();
    let td = t.data();
    let mut out = vec![0.0; nx * nt];
    let mut idx = vec![0; q];
    for c in 0..nt {
        unflatten(n, q, c, &mut idx);
        for (k, &i) in idx.iter().enumerate() {
            let step = n.pow((q - 1 - k) as u32);
            let base = c - i * step;
            for xf in 0..nx {
                let eb = xf * n * n;
                let mut s = 0.0;
                for r in 0..n {
                    s += ed[eb + r * n + i] * td[base + r * step];
                }
                out[xf * nt + c] += s;
            }
        }
    }
    out
}

/// `out[A, B] = Σ_ρ a[A, ρ] b[ρ, B]` where `a` has its contracted index last
/// and `b` first.
fn contract_last_first(a: &Tensor, b: &Tensor) -> Vec<f64> {
    let n = a.n();
    let ra = a.data().len() / n;
    let cb = b.data().len() / n;
    let am = DMatrix::from_row_slice(ra, n, a.data());
    let bm = DMatrix::from_row_slice(n, cb, b.data());
    let prod = am * bm;
    // row-major flatten
    let mut out = Vec::with_capacity(ra * cb);
    for r in 0..ra {
        for c in 0..cb {
            out.push(prod[(r, c)]);
        }
    }
    out
}

/// Curvature endomorphisms `R^ρ_{aλμ}` laid out as `[λ, μ, ρ, a]`.
fn riemann_family(pv: &PointValues) -> Tensor {
    Tensor::from_fn(pv.n, |[l, m, r, a]| pv.riem_mixed.get([r, a, l, m]))
}

/// `Σ_i R^ρ_{α_i λμ} R_{..ρ..}`: zero exactly when `R·R = 0`.
pub fn semisymmetry_residual(pv: &PointValues) -> (f64, f64) {
    let res = derivation(&riemann_family(pv), &pv.riem);
    let scale = pv.factor(&pv.riem_mixed, 0) * pv.factor(&pv.riem, 0);
    (max_abs(&res), scale)
}

/// Evaluates every identity of the suite at a point.
pub fn identity_suite(pv: &PointValues, tol: Tolerances) -> Vec<IdentityResult> {
    let n = pv.n;
    let nf = n as f64;
    let mut out = Vec::new();
    let mut push = |name: &str, residual: f64, scale: f64| {
        out.push(IdentityResult { name: name.into(), residual, scale, pass: tol.is_zero(residual, scale) });
    };

    let f_rm = pv.factor(&pv.riem_mixed, 0);
    let f_rd = pv.factor(&pv.riem, 0);
    let f_drm = pv.factor(&pv.d_riem_mixed, 1);
    let f_drd = pv.factor(&pv.d_riem, 1);
    let f_ric = pv.factor(&pv.ricci, 0).max(pv.factor(&pv.ricci_mixed, 0));
    let f_dric = pv.factor(&pv.d_ricci, 1);
    let f_c = pv.factor(&pv.weyl, 0);
    let f_cm = pv.factor(&pv.weyl_mixed, 0);
    let f_dc = pv.factor(&pv.d_weyl, 1);
    let riem_fam = riemann_family(pv);

    // Σ_i ∇_ν R^ρ_{α_i λμ} R_{..ρ..} − R^ρ_{νλμ} ∇_ρ R_{αβγδ}
    {
        let e = Tensor::from_fn(n, |[v, l, m, r, a]| pv.d_riem_mixed.get([v, r, a, l, m]));
        let mut res = derivation(&e, &pv.riem);
        let a = Tensor::from_fn(n, |[v, l, m, r]| pv.riem_mixed.get([r, v, l, m]));
        let second = contract_last_first(&a, &pv.d_riem);
        for (x, y) in res.iter_mut().zip(&second) {
            *x -= y;
        }
        push("grad_riemann_derivation", max_abs(&res), (f_drm * f_rd).max(f_rm * f_drd));
    }

    // (∇_ν R^ρ_{τλμ} + ∇_τ R^ρ_{νλμ}) ∇_ρ R_{αβγδ}, and its symmetrized forms
    let sym = Tensor::from_fn(n, |[v, t, l, m, r]| pv.d_riem_mixed.get([v, r, t, l, m]) + pv.d_riem_mixed.get([t, r, v, l, m]));
    let res = contract_last_first(&sym, &pv.d_riem);
    push("sym_grad_riemann_on_grad_riemann", max_abs(&res), f_drm * f_drd);

    let dric_mixed = pv.d_ricci.contract_slot(1, &pv.g_inv); // ∇_ν R^ρ_μ as [ν, ρ, μ]
    let f_dricm = pv.factor(&dric_mixed, 1);
    {
        let a = Tensor::from_fn(n, |[v, m, r]| dric_mixed.get([v, r, m]) - dric_mixed.get([m, r, v]));
        let res = contract_last_first(&a, &pv.d_riem);
        push("antisym_grad_ricci_on_grad_riemann", max_abs(&res), f_dricm * f_drd);
        let grad_up = pv.d_ricci.contract_slot(0, &pv.g_inv); // ∇^ρ R_{μν} as [ρ, μ, ν]
        let a = Tensor::from_fn(n, |[m, v, r]| grad_up.get([r, m, v]) - 2.0 * dric_mixed.get([v, r, m]));
        let res = contract_last_first(&a, &pv.d_riem);
        push("contracted_bianchi_on_grad_riemann", max_abs(&res), 2.0 * f_dricm.max(pv.factor(&grad_up, 1)) * f_drd);
    }

    let (res, scale) = semisymmetry_residual(pv);
    push(SEMISYMMETRY, res, scale);

    // R^ρ_{νλμ} ∇_ρ R_{αβγδ} + Σ_i R^ρ_{α_i λμ} ∇_ν R_{..ρ..}
    {
        let res = derivation(&riem_fam, &pv.d_riem);
        push("riemann_semisymmetry_on_grad", max_abs(&res), f_rm * f_drd);
    }

    let half = sym.scaled(0.5);
    push("sym_grad_riemann_on_grad_riemann_half", max_abs(&contract_last_first(&half, &pv.d_riem)), f_drm * f_drd);
    push("sym_grad_riemann_on_grad_weyl", max_abs(&contract_last_first(&half, &pv.d_weyl)), f_drm * f_dc);
    push("sym_grad_riemann_on_grad_ricci", max_abs(&contract_last_first(&half, &pv.d_ricci)), f_drm * f_dric);

    // R_{ρ(μ} R^ρ_{ν)αβ}
    {
        let mut worst = 0.0f64;
        for m in 0..n {
            for v in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let mut s = 0.0;
                        for r in 0..n {
                            s += pv.ricci.get([r, m]) * pv.riem_mixed.get([r, v, a, b])
                                + pv.ricci.get([r, v]) * pv.riem_mixed.get([r, m, a, b]);
                        }
                        worst = worst.max((0.5 * s).abs());
                    }
                }
            }
        }
        push("ricci_riemann_symmetric", worst, f_ric * f_rm);
    }

    // X^ρ_{μ[αβ} R_{γ]ρ} for X = Riemann, Weyl
    let cyclic = |x: &Tensor| {
        let mut worst = 0.0f64;
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut s = 0.0;
                        for r in 0..n {
                            s += x.get([r, m, a, b]) * pv.ricci.get([c, r])
                                + x.get([r, m, b, c]) * pv.ricci.get([a, r])
                                + x.get([r, m, c, a]) * pv.ricci.get([b, r]);
                        }
                        worst = worst.max((s / 3.0).abs());
                    }
                }
            }
        }
        worst
    };
    push("riemann_ricci_cyclic", cyclic(&pv.riem_mixed), f_rm * f_ric);
    push("weyl_ricci_cyclic", cyclic(&pv.weyl_mixed), f_cm * f_ric);

    // R^{ρσ} R_{ρμσν} − R_μ^ρ R_{ρν}
    {
        let mut worst = 0.0f64;
        for m in 0..n {
            for v in 0..n {
                let mut s = 0.0;
                for r in 0..n {
                    s -= pv.ricci_mixed.get([r, m]) * pv.ricci.get([r, v]);
                    for sg in 0..n {
                        s += pv.ricci_up.get([r, sg]) * pv.riem.get([r, m, sg, v]);
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        let scale = (pv.factor(&pv.ricci_up, 0) * f_rd).max(f_ric * f_ric);
        push("ricci_square_contraction", worst, scale);
    }

    // Σ_i R^ρ_{α_i λμ} C_{..ρ..}
    push("weyl_semisymmetry", max_abs(&derivation(&riem_fam, &pv.weyl)), f_rm * f_c);

    let (res, scale) = weyl_quadratic(pv, nf, WEYL_QUADRATIC_DELTA_SIGN);
    push("weyl_quadratic", res, scale);
    out
}

/// Coefficient sign of the `R_ρ^{[λ} δ^{μ]}_{[α} C^ρ_{β]γδ}` group. The
/// variant with `−2` fails on symmetric products such as `R^{1,1} × S²`.
const WEYL_QUADRATIC_DELTA_SIGN: f64 = 1.0;

/// The quadratic Weyl identity with free indices `α β γ δ` down and `λ μ` up.
fn weyl_quadratic(pv: &PointValues, nf: f64, delta_sign: f64) -> (f64, f64) {
    let n = pv.n;
    // C_{ρα}^{λμ} as [ρ, α, λ, μ]
    let c_dduu = pv.weyl.contract_slots(&[2, 3], &pv.g_inv);
    let cm = &pv.weyl_mixed;
    // R_α^λ = g^{λσ} R_{σα}
    let rm = |a: usize, l: usize| pv.ricci_mixed.get([l, a]);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let scalar = pv.scalar;

    // A(α,β,γ,δ,λ,μ) = C_{ρα}^{λμ} C^ρ_{βγδ}
    let a_term = |a: usize, b: usize, c: usize, d: usize, l: usize, m: usize| {
        (0..n).map(|r| c_dduu.get([r, a, l, m]) * cm.get([r, b, c, d])).sum::<f64>()
    };
    let b_term = |a: usize, b: usize, c: usize, d: usize, l: usize, m: usize| rm(a, l) * cm.get([m, b, c, d]);
    let d_term = |a: usize, b: usize, c: usize, d: usize, l: usize, m: usize| {
        delta(m, a) * (0..n).map(|r| rm(r, l) * cm.get([r, b, c, d])).sum::<f64>()
    };
    let e_term = |a: usize, b: usize, c: usize, d: usize, l: usize, m: usize| delta(l, a) * cm.get([m, b, c, d]);
    // antisymmetrize over (α β) only, or over (α β) and (λ μ)
    let anti1 = |f: &dyn Fn(usize, usize, usize, usize, usize, usize) -> f64, a, b, c, d, l, m| {
        0.5 * (f(a, b, c, d, l, m) - f(b, a, c, d, l, m))
    };
    let anti2 = |f: &dyn Fn(usize, usize, usize, usize, usize, usize) -> f64, a, b, c, d, l, m| {
        0.25 * (f(a, b, c, d, l, m) - f(b, a, c, d, l, m) - f(a, b, c, d, m, l) + f(b, a, c, d, m, l))
    };

    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            let t1 = anti1(&a_term, a, b, c, d, l, m) + anti1(&a_term, c, d, a, b, l, m);
                            let t2 = anti2(&b_term, a, b, c, d, l, m) + anti2(&b_term, c, d, a, b, l, m);
                            let t3 = anti2(&d_term, a, b, c, d, l, m) + anti2(&d_term, c, d, a, b, l, m);
                            let t4 = anti2(&e_term, a, b, c, d, l, m) + anti2(&e_term, c, d, a, b, l, m);
                            let v = (nf - 2.0) * t1 - 2.0 * t2 + delta_sign * 2.0 * t3 + 2.0 * scalar / (nf - 1.0) * t4;
                            worst = worst.max(v.abs());
                        }
                    }
                }
            }
        }
    }
    let f_cu = pv.factor(&c_dduu, 0);
    let f_cm = pv.factor(cm, 0);
    let f_ric = pv.factor(&pv.ricci_mixed, 0);
    let scale = ((nf - 2.0) * f_cu * f_cm).max(2.0 * f_ric * f_cm).max(2.0 * scalar.abs() / (nf - 1.0) * f_cm);
    (worst, scale)
}
