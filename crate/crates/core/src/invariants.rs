//! Curvature invariants, the curvature operator on 2-forms, and zero testing.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::geometry::PointValues;
use crate::tensor::Tensor;

/// Absolute and relative thresholds for deciding that a number is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-8, abs: 1e-10 }
    }
}

impl Tolerances {
    pub fn is_zero(&self, value: f64, scale: f64) -> bool {
        zero_test(value, scale, *self)
    }
}

/// `|value| ≤ tol.abs + tol.rel · scale`.
pub fn zero_test(value: f64, scale: f64, tol: Tolerances) -> bool {
    value.abs() <= tol.abs + tol.rel * scale
}

/// Relative singular-value floor for the genericity verdict.
pub const GENERIC_RATIO: f64 = 1e-7;
/// Minimum `σ_max / scale` for a curvature operator to count as nonzero.
pub const GENERIC_FLOOR: f64 = 1e-10;

/// Riemann as an endomorphism of 2-forms in the basis `dx^α ∧ dx^β`, `α < β`
/// (pairs ordered lexicographically). Entry `[(αβ), (γδ)] = R^{αβ}_{γδ}`,
/// which is the action `F ↦ ½ R^{αβ}_{γδ} F^{γδ}` restricted to independent
/// components.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureOperator {
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub generic: bool,
}

/// Index pairs `(α, β)` with `α < β` in basis order.
pub fn two_form_basis(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

impl CurvatureOperator {
    pub fn new(pv: &PointValues) -> Self {
        let n = pv.n;
        // R^{αβ}_{γδ} = g^{βσ} R^α_{σγδ}
        let raised = pv.riem_mixed.contract_slot(1, &pv.g_inv);
        let basis = two_form_basis(n);
        let m = basis.len();
        let matrix = DMatrix::from_fn(m, m, |r, c| {
            let (a, b) = basis[r];
            let (g, d) = basis[c];
            raised.get([a, b, g, d])
        });
        let sv = if m == 0 { Default::default() } else { matrix.clone().singular_values() };
        let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
        let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let sigma_min = if sigma_min.is_finite() { sigma_min } else { 0.0 };
        let generic = m > 0 && sigma_min > GENERIC_RATIO * sigma_max && sigma_max > GENERIC_FLOOR * pv.frame_scale;
        Self { matrix, sigma_min, sigma_max, generic }
    }
}

/// Value of an invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InvariantValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl InvariantValue {
    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Scalar(v) => v.abs(),
            Self::Vector(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Self::Matrix(m) => m.iter().flatten().fold(0.0, |a, x| a.max(x.abs())),
        }
    }
}

/// A named invariant; `order` counts covariant derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct Invariant {
    pub name: String,
    pub order: usize,
    pub value: InvariantValue,
    pub scale: f64,
    pub zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub entries: Vec<Invariant>,
    /// Largest magnitude over first-order entries.
    pub max_order_one: f64,
}

impl InvariantReport {
    pub fn get(&self, name: &str) -> Option<&Invariant> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Do all listed quadratic first-order invariants (scalars, 1-forms and
    /// rank-2 tensors) vanish?
    pub fn order_one_zero(&self) -> bool {
        self.entries.iter().filter(|e| e.order == 1 && !e.name.starts_with("grad_scalar_curvature")).all(|e| e.zero)
    }
}

fn full(t: &Tensor, other: &Tensor) -> f64 {
    t.data().iter().zip(other.data()).map(|(a, b)| a * b).sum()
}

fn matrix(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect()
}

fn trace(pv: &PointValues, m: &[Vec<f64>]) -> f64 {
    let n = pv.n;
    (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| pv.g_inv.get([a, b]) * m[a][b]).sum()
}

/// Evaluates the degree-2 curvature scalars and the first-order quadratic
/// invariants (1-forms, rank-2 tensors and their traces).
pub fn scalar_invariants(pv: &PointValues, tol: Tolerances) -> InvariantReport {
    let n = pv.n;
    let mut entries = Vec::new();
    let mut push = |name: &str, order: usize, value: InvariantValue, scale: f64| {
        let zero = tol.is_zero(value.max_abs(), scale);
        entries.push(Invariant { name: name.to_string(), order, value, scale, zero });
    };

    // Scales are orthonormal-frame magnitudes: coordinate components of
    // different index placements can differ by powers of the coordinates.
    let m_ric0 = pv.frame_factor(&pv.ricci, 0);
    let m_riem0 = pv.frame_factor(&pv.riem, 0);
    let m_weyl0 = pv.frame_factor(&pv.weyl, 0);
    let m_dric = pv.frame_factor(&pv.d_ricci, 1);
    let m_driem = pv.frame_factor(&pv.d_riem, 1);

    push("scalar_curvature", 0, InvariantValue::Scalar(pv.scalar), m_ric0);
    push("ricci_squared", 0, InvariantValue::Scalar(full(&pv.ricci_up, &pv.ricci)), m_ric0 * m_ric0);
    let kretschmann = full(&pv.riem_up, &pv.riem);
    push("kretschmann", 0, InvariantValue::Scalar(kretschmann), m_riem0 * m_riem0);
    let weyl_up = pv.weyl.contract_slots(&[0, 1, 2, 3], &pv.g_inv);
    push("weyl_squared", 0, InvariantValue::Scalar(full(&weyl_up, &pv.weyl)), m_weyl0 * m_weyl0);

    // 1-forms
    let ric = |f: &dyn Fn(usize) -> f64| (0..n).map(f).collect::<Vec<_>>();
    let i1 = ric(&|a| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                s += pv.ricci_up.get([m, v]) * pv.d_ricci.get([a, m, v]);
            }
        }
        s
    });
    let i2 = ric(&|a| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                s += pv.ricci_up.get([m, v]) * pv.d_ricci.get([m, v, a]);
            }
        }
        s
    });
    // R^{μνρ}_α ∇_μ R_{νρ}
    let riem_uuud = pv.riem.contract_slots(&[0, 1, 2], &pv.g_inv);
    let i3 = ric(&|a| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    s += riem_uuud.get([m, v, r, a]) * pv.d_ricci.get([m, v, r]);
                }
            }
        }
        s
    });
    let i4 = ric(&|a| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    for sg in 0..n {
                        s += pv.riem_up.get([m, v, r, sg]) * pv.d_riem.get([m, v, r, sg, a]);
                    }
                }
            }
        }
        s
    });
    let i5 = ric(&|a| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    for sg in 0..n {
                        s += pv.riem_up.get([m, v, r, sg]) * pv.d_riem.get([a, m, v, r, sg]);
                    }
                }
            }
        }
        s
    });
    let s_ric = m_ric0 * m_dric;
    let s_riem = m_riem0 * m_driem;
    let s_mixed = m_riem0 * m_dric;
    push("ricci_grad_ricci", 1, InvariantValue::Vector(i1), s_ric);
    push("ricci_div_ricci", 1, InvariantValue::Vector(i2), s_ric);
    push("riemann_grad_ricci", 1, InvariantValue::Vector(i3), s_mixed);
    push("riemann_div_riemann", 1, InvariantValue::Vector(i4), s_riem);
    push("riemann_grad_riemann", 1, InvariantValue::Vector(i5.clone()), s_riem);

    // rank-2
    let dric_upfirst = pv.d_ricci.contract_slot(0, &pv.g_inv); // ∇^μ R_{νβ}
    let dric_all_up = pv.d_ricci_up.contract_slot(0, &pv.g_inv); // ∇^μ R^{νρ}
    let driem_upd = pv.d_riem_up.contract_slot(0, &pv.g_inv); // ∇^σ R^{μνρα}
    let j1 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                s += pv.d_ricci_up.get([a, m, v]) * pv.d_ricci.get([b, m, v]);
            }
        }
        s
    });
    let j2 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                s += pv.d_ricci.get([m, v, b]) * pv.d_ricci_up.get([a, m, v]);
            }
        }
        s
    });
    // ∇^μ R^ν_β with both μ and ν raised
    let dric_up_up_d = dric_upfirst.contract_slot(1, &pv.g_inv);
    let j3 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                // ∇_μ R_{να} ∇^μ R^ν_β
                s += pv.d_ricci.get([m, v, a]) * dric_up_up_d.get([m, v, b]);
            }
        }
        s
    });
    let j4 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                // ∇_μ R_{να} ∇^ν R^μ_β
                s += pv.d_ricci.get([m, v, a]) * dric_up_up_d.get([v, m, b]);
            }
        }
        s
    });
    let j5 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    s += dric_all_up.get([m, v, r]) * pv.d_riem.get([a, b, r, m, v]);
                }
            }
        }
        s
    });
    let j6 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    s += dric_all_up.get([m, v, r]) * pv.d_riem.get([m, a, v, b, r]);
                }
            }
        }
        s
    });
    let j7 = matrix(n, |a, b| {
        let mut s = 0.0;
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    for sg in 0..n {
                        s += pv.d_riem_up.get([a, m, v, r, sg]) * pv.d_riem.get([b, m, v, r, sg]);
                    }
                }
            }
        }
        s
    });
    // ∇^σ R^{μνρ}_α ∇_σ R_{μνρβ}
    let driem_upd_low = driem_upd.contract_slot(4, &pv.g);
    let j8 = matrix(n, |a, b| {
        let mut s = 0.0;
        for sg in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for r in 0..n {
                        s += driem_upd_low.get([sg, m, v, r, a]) * pv.d_riem.get([sg, m, v, r, b]);
                    }
                }
            }
        }
        s
    });
    let rank2 = [
        ("grad_ricci_grad_ricci", j1, m_dric * m_dric),
        ("div_ricci_grad_ricci", j2, m_dric * m_dric),
        ("grad_ricci_contracted_a", j3, m_dric * m_dric),
        ("grad_ricci_contracted_b", j4, m_dric * m_dric),
        ("grad_ricci_grad_riemann_a", j5, m_dric * m_driem),
        ("grad_ricci_grad_riemann_b", j6, m_dric * m_driem),
        ("grad_riemann_grad_riemann", j7, m_driem * m_driem),
        ("grad_riemann_contracted", j8, m_driem * m_driem),
    ];
    for (name, m, scale) in rank2 {
        let tr = trace(pv, &m);
        push(name, 1, InvariantValue::Matrix(m), scale);
        push(&format!("{name}_trace"), 1, InvariantValue::Scalar(tr), scale);
    }

    // ∂_α K = 2 R^{μνρσ} ∇_α R_{μνρσ}
    let dk: Vec<f64> = i5.iter().map(|x| 2.0 * x).collect();
    let mut dk2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            dk2 += pv.g_inv.get([a, b]) * dk[a] * dk[b];
        }
    }
    push("kretschmann_gradient_squared", 1, InvariantValue::Scalar(dk2), 4.0 * s_riem * s_riem);

    let m_ds = pv.frame_factor(&Tensor::from_fn(n, |[a]| pv.d_scalar[a]), 1);
    push("grad_scalar_curvature", 1, InvariantValue::Vector(pv.d_scalar.clone()), m_ds);
    let mut ds2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            ds2 += pv.g_inv.get([a, b]) * pv.d_scalar[a] * pv.d_scalar[b];
        }
    }
    push("grad_scalar_curvature_squared", 1, InvariantValue::Scalar(ds2), m_ds * m_ds);

    let hessian = matrix(n, |a, b| pv.dd_scalar.get([a, b]));
    let m_dds = pv.frame_factor(&pv.dd_scalar, 2);
    push("hessian_scalar_curvature", 2, InvariantValue::Matrix(hessian), m_dds);

    let max_order_one = entries.iter().filter(|e| e.order == 1).map(|e| e.value.max_abs()).fold(0.0, f64::max);
    InvariantReport { entries, max_order_one }
}
