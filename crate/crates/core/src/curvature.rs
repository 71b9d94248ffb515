//! Levi-Civita curvature as jet-valued fields.
//!
//! Conventions: signature (−,+,…,+);
//! `R^α_{βγδ} = ∂_γ Γ^α_{δβ} − ∂_δ Γ^α_{γβ} + Γ^α_{γρ} Γ^ρ_{δβ} − Γ^α_{δρ} Γ^ρ_{γβ}`;
//! `R_{βδ} = R^ρ_{βρδ}`; `R = g^{βδ} R_{βδ}`. The unit 2-sphere has `R = +2`.
//! Every derivative consumes one jet order: a metric of order `K` yields
//! `Γ` at `K−1`, Riemann at `K−2` and `∇^m Riemann` at `K−2−m`.

use nalgebra::DMatrix;

use crate::dsl::MetricGerm;
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::tensor::{unflatten, Slot, Tensor, TensorJet};

use Slot::{Down, Up};

/// Metric, inverse metric and connection at one point.
#[derive(Clone, Debug)]
pub struct MetricFrame {
    pub point: Vec<f64>,
    /// Jet order of the metric.
    pub order: usize,
    pub g: TensorJet,
    pub g_inv: TensorJet,
    pub christoffel: TensorJet,
    /// Max |g| over components; raised to include |Riemann| once it is known.
    pub scale: f64,
    pub lorentzian: bool,
}

impl MetricFrame {
    pub fn new(germ: &MetricGerm) -> Result<Self> {
        let g = TensorJet::from_grid(&germ.g, [Down, Down])?;
        let g_inv = inverse_metric_jets(&g).map_err(|e| match e {
            Error::DegenerateMetric(_) => Error::DegenerateMetric(germ.point.clone()),
            other => other,
        })?;
        let christoffel = christoffel(&g, &g_inv)?;
        let scale = g.values().max_abs();
        Ok(Self {
            point: germ.point.clone(),
            order: germ.order,
            g,
            g_inv,
            christoffel,
            scale,
            lorentzian: germ.is_lorentzian(),
        })
    }

    pub fn dim(&self) -> usize {
        self.g.n()
    }

    /// Largest |Γ| value, used to scale derivative tolerances.
    pub fn christoffel_scale(&self) -> f64 {
        self.christoffel.values().max_abs()
    }
}

fn jet_matmul(a: &TensorJet, b: &TensorJet, order: usize) -> TensorJet {
    let n = a.n();
    let mut out = TensorJet::zeros(n, order, &[a.valence()[0], b.valence()[1]]);
    for i in 0..n {
        for j in 0..n {
            let c = out.index(&[i, j]);
            for k in 0..n {
                out.mul_acc(c, a.at(&[i, k]), b.at(&[k, j]), 1.0);
            }
        }
    }
    out
}

/// Jet-valued inverse of a symmetric `(down, down)` metric: Newton iteration
/// `X ← X(2I − G X)` from the inverse of the value matrix, doubling the
/// number of correct orders per step.
pub fn inverse_metric_jets(g: &TensorJet) -> Result<TensorJet> {
    let n = g.n();
    let order = g.order();
    let values = DMatrix::from_fn(n, n, |i, j| g.at(&[i, j])[0]);
    let inv = values
        .clone()
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::DegenerateMetric(Vec::new()))?;
    let mut x = TensorJet::zeros(n, 0, &[Up, Up]);
    for i in 0..n {
        for j in 0..n {
            // symmetrize the value inverse so that g⁻¹ is exactly symmetric
            let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            x.set_jet(&[i, j], &Jet::constant(v, n, 0));
        }
    }
    let mut done = 0;
    while done < order {
        let target = (2 * done + 1).min(order);
        let mut x_t = TensorJet::zeros(n, target, &[Up, Up]);
        for c in 0..x.component_count() {
            let src = x.comp(c);
            x_t.comp_mut(c)[..src.len()].copy_from_slice(src);
        }
        let gx = jet_matmul(&g.truncate(target), &x_t, target);
        let mut two_minus = gx.clone();
        for c in 0..two_minus.component_count() {
            for v in two_minus.comp_mut(c) {
                *v = -*v;
            }
        }
        for i in 0..n {
            let c = two_minus.index(&[i, i]);
            two_minus.comp_mut(c)[0] += 2.0;
        }
        x = jet_matmul(&x_t, &two_minus, target);
        done = target;
    }
    // enforce exact symmetry
    for i in 0..n {
        for j in i + 1..n {
            let a = x.index(&[i, j]);
            let b = x.index(&[j, i]);
            let avg: Vec<f64> = x.comp(a).iter().zip(x.comp(b)).map(|(p, q)| 0.5 * (p + q)).collect();
            x.comp_mut(a).copy_from_slice(&avg);
            x.comp_mut(b).copy_from_slice(&avg);
        }
    }
    Ok(x)
}

/// `Γ^α_{βγ} = ½ g^{αρ}(∂_β g_{ργ} + ∂_γ g_{ρβ} − ∂_ρ g_{βγ})`, symmetric in `βγ`.
pub fn christoffel(g: &TensorJet, g_inv: &TensorJet) -> Result<TensorJet> {
    let n = g.n();
    if g.order() < 1 {
        return Err(Error::JetBudget { needed: 1, available: g.order() });
    }
    let order = g.order() - 1;
    let dg: Vec<TensorJet> = (0..n).map(|v| g.partial(v)).collect::<Result<_>>()?;
    let g_inv = g_inv.truncate(order);
    // first-kind symbols Γ_{ρβγ}
    let mut first = TensorJet::zeros(n, order, &[Down, Down, Down]);
    for r in 0..n {
        for b in 0..n {
            for c in b..n {
                let k = first.index(&[r, b, c]);
                first.add_acc(k, dg[b].at(&[r, c]), 0.5);
                first.add_acc(k, dg[c].at(&[r, b]), 0.5);
                first.add_acc(k, dg[r].at(&[b, c]), -0.5);
            }
        }
    }
    let mut out = TensorJet::zeros(n, order, &[Up, Down, Down]);
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let k = out.index(&[a, b, c]);
                for r in 0..n {
                    let f = first.index(&[r, b, c]);
                    let (ginv_ar, first_rbc) = (g_inv.at(&[a, r]), first.comp(f));
                    out.mul_acc(k, ginv_ar, first_rbc, 1.0);
                }
                if c != b {
                    let k2 = out.index(&[a, c, b]);
                    out.copy_comp(k, k2, 1.0);
                }
            }
        }
    }
    Ok(out)
}

/// Riemann tensor `R^α_{βγδ}` at order `K−2`.
pub fn riemann(frame: &MetricFrame) -> Result<TensorJet> {
    let gamma = &frame.christoffel;
    let n = gamma.n();
    if gamma.order() < 1 {
        return Err(Error::JetBudget { needed: 2, available: frame.order });
    }
    let order = gamma.order() - 1;
    let dgamma: Vec<TensorJet> = (0..n).map(|v| gamma.partial(v)).collect::<Result<_>>()?;
    let gt = gamma.truncate(order);
    let mut out = TensorJet::zeros(n, order, &[Up, Down, Down, Down]);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    let k = out.index(&[a, b, c, d]);
                    out.add_acc(k, dgamma[c].at(&[a, d, b]), 1.0);
                    out.add_acc(k, dgamma[d].at(&[a, c, b]), -1.0);
                    for r in 0..n {
                        out.mul_acc(k, gt.at(&[a, c, r]), gt.at(&[r, d, b]), 1.0);
                        out.mul_acc(k, gt.at(&[a, d, r]), gt.at(&[r, c, b]), -1.0);
                    }
                    let k2 = out.index(&[a, b, d, c]);
                    out.copy_comp(k, k2, -1.0);
                }
            }
        }
    }
    Ok(out)
}

/// Ricci tensor `R_{βδ} = R^ρ_{βρδ}` and scalar `R = g^{βδ} R_{βδ}`.
pub fn ricci_and_scalar(frame: &MetricFrame, riemann: &TensorJet) -> (TensorJet, Jet) {
    let n = riemann.n();
    let order = riemann.order();
    let mut ricci = TensorJet::zeros(n, order, &[Down, Down]);
    for b in 0..n {
        for d in 0..n {
            let k = ricci.index(&[b, d]);
            for r in 0..n {
                ricci.add_acc(k, riemann.at(&[r, b, r, d]), 1.0);
            }
        }
    }
    let g_inv = frame.g_inv.truncate(order);
    let mut scalar = TensorJet::zeros(n, order, &[]);
    for b in 0..n {
        for d in 0..n {
            scalar.mul_acc(0, g_inv.at(&[b, d]), ricci.at(&[b, d]), 1.0);
        }
    }
    (ricci, scalar.jet(&[]))
}

/// Weyl tensor `C_{αβγδ}` (all indices down) from the Riemann decomposition.
/// Identically zero for `n ≤ 3`.
pub fn weyl(frame: &MetricFrame, riemann: &TensorJet, ricci: &TensorJet, scalar: &Jet) -> Result<TensorJet> {
    let n = riemann.n();
    if n < 2 {
        return Err(Error::InvalidSpec(format!("Weyl tensor needs dimension ≥ 2, got {n}")));
    }
    let order = riemann.order();
    let mut out = TensorJet::zeros(n, order, &[Down, Down, Down, Down]);
    if n <= 3 {
        return Ok(out);
    }
    let g = frame.g.truncate(order);
    let lowered = riemann.lower(0, &g);
    let nf = n as f64;
    let c1 = 1.0 / (nf - 2.0);
    let c2 = 1.0 / ((nf - 1.0) * (nf - 2.0));
    let mut rg = vec![0.0; g.layout().count(order)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let k = out.index(&[a, b, c, d]);
                    out.add_acc(k, lowered.at(&[a, b, c, d]), 1.0);
                    out.mul_acc(k, ricci.at(&[a, c]), g.at(&[b, d]), -c1);
                    out.mul_acc(k, ricci.at(&[a, d]), g.at(&[b, c]), c1);
                    out.mul_acc(k, ricci.at(&[b, c]), g.at(&[a, d]), c1);
                    out.mul_acc(k, ricci.at(&[b, d]), g.at(&[a, c]), -c1);
                    rg.iter_mut().for_each(|v| *v = 0.0);
                    g.layout().mul_acc(&mut rg, g.at(&[a, c]), g.at(&[b, d]), order, 1.0);
                    g.layout().mul_acc(&mut rg, g.at(&[a, d]), g.at(&[b, c]), order, -1.0);
                    out.mul_acc(k, scalar.coeffs(), &rg, c2);
                }
            }
        }
    }
    Ok(out)
}

/// Covariant derivative `∇_μ t`; the new index is prepended (down) and the
/// result is one jet order lower than `t`.
pub fn cov_derivative(t: &TensorJet, frame: &MetricFrame) -> Result<TensorJet> {
    if t.order() == 0 {
        return Err(Error::JetBudget { needed: frame.order + 1, available: frame.order });
    }
    let m = t.order() - 1;
    if frame.christoffel.order() < m {
        return Err(Error::JetBudget { needed: frame.order + 1, available: frame.order });
    }
    let n = t.n();
    let rank = t.rank();
    let count = t.component_count();
    let gamma = frame.christoffel.truncate(m);
    let tt = t.truncate(m);
    let mut valence = vec![Down];
    valence.extend_from_slice(t.valence());
    let mut out = TensorJet::zeros(n, m, &valence);
    let mut idx = vec![0; rank];
    for mu in 0..n {
        let d = t.partial(mu)?;
        for c in 0..count {
            out.add_acc(mu * count + c, d.comp(c), 1.0);
        }
        for c in 0..count {
            unflatten(n, rank, c, &mut idx);
            let k = mu * count + c;
            for (p, slot) in t.valence().iter().enumerate() {
                let step = n.pow((rank - 1 - p) as u32);
                let i = idx[p];
                let base = c - i * step;
                for r in 0..n {
                    let src = tt.comp(base + r * step);
                    match slot {
                        Up => out.mul_acc(k, gamma.at(&[i, mu, r]), src, 1.0),
                        Down => out.mul_acc(k, gamma.at(&[r, mu, i]), src, -1.0),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Riemann rebuilt from its Weyl, Ricci and scalar parts (values, all
/// indices down). In two dimensions only the scalar part exists.
pub fn recompose_riemann(weyl: &Tensor, ricci: &Tensor, scalar: f64, g: &Tensor) -> Tensor {
    let n = g.n();
    let nf = n as f64;
    if n == 2 {
        return Tensor::from_fn(n, |[a, b, c, d]| {
            0.5 * scalar * (g.get([a, c]) * g.get([b, d]) - g.get([a, d]) * g.get([b, c]))
        });
    }
    Tensor::from_fn(n, |[a, b, l, m]| {
        // 2/(n−2)(R_{a[l} g_{m]b} − R_{b[l} g_{m]a}) with unit-weight brackets
        let ricci_part = (ricci.get([a, l]) * g.get([m, b]) - ricci.get([a, m]) * g.get([l, b])
            - ricci.get([b, l]) * g.get([m, a])
            + ricci.get([b, m]) * g.get([l, a]))
            / (nf - 2.0);
        let scalar_part =
            scalar / ((nf - 1.0) * (nf - 2.0)) * (g.get([a, l]) * g.get([b, m]) - g.get([a, m]) * g.get([b, l]));
        weyl.get([a, b, l, m]) + ricci_part - scalar_part
    })
}
