//! Everything computed at one sample point: the jet tower `∇^k Riemann` and
//! the base-point values of the tensors the invariants and identities use.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::curvature::{cov_derivative, ricci_and_scalar, riemann, weyl, MetricFrame};
use crate::dsl::{evaluate_metric, MetricSpec};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::tensor::{Tensor, TensorJet};

/// Jet-level curvature at a point.
#[derive(Clone, Debug)]
pub struct PointCurvature {
    pub frame: MetricFrame,
    pub ricci: TensorJet,
    pub scalar: Jet,
    /// `C_{αβγδ}`.
    pub weyl: TensorJet,
    /// `tower[k] = ∇^k R^α_{βγδ}`, derivative indices first (outermost last applied).
    pub tower: Vec<TensorJet>,
}

impl PointCurvature {
    /// Builds the tower up to `depth` covariant derivatives. Needs metric
    /// order `≥ depth + 2`.
    pub fn new(mut frame: MetricFrame, depth: usize) -> Result<Self> {
        if depth + 2 > frame.order {
            return Err(Error::JetBudget { needed: depth + 2, available: frame.order });
        }
        let riem = riemann(&frame)?;
        frame.scale = frame.scale.max(riem.values().max_abs());
        let (ricci, scalar) = ricci_and_scalar(&frame, &riem);
        let weyl = weyl(&frame, &riem, &ricci, &scalar)?;
        let mut tower = vec![riem];
        for _ in 0..depth {
            let next = cov_derivative(tower.last().unwrap(), &frame)?;
            tower.push(next);
        }
        Ok(Self { frame, ricci, scalar, weyl, tower })
    }

    pub fn at(spec: &MetricSpec, point: &[f64], order: usize, depth: usize) -> Result<Self> {
        let germ = evaluate_metric(spec, point, order)?;
        Self::new(MetricFrame::new(&germ)?, depth)
    }

    pub fn depth(&self) -> usize {
        self.tower.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// `max |∇^k R^α_{βγδ}|` at the point for every available `k`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.tower.iter().map(|t| t.values().max_abs()).collect()
    }
}

/// Base-point values of the curvature tensors in the index placements the
/// invariant lists and identities need.
#[derive(Clone, Debug)]
pub struct PointValues {
    pub n: usize,
    pub g: Tensor,
    pub g_inv: Tensor,
    /// `R^α_{βγδ}`
    pub riem_mixed: Tensor,
    /// `R_{αβγδ}`
    pub riem: Tensor,
    /// `R^{αβγδ}`
    pub riem_up: Tensor,
    pub ricci: Tensor,
    /// `R^α_β`
    pub ricci_mixed: Tensor,
    pub ricci_up: Tensor,
    pub scalar: f64,
    /// `C_{αβγδ}`
    pub weyl: Tensor,
    /// `C^α_{βγδ}`
    pub weyl_mixed: Tensor,
    /// `∇_ε R^α_{βγδ}`
    pub d_riem_mixed: Tensor,
    /// `∇_ε R_{αβγδ}`
    pub d_riem: Tensor,
    /// `∇_ε R^{αβγδ}`, derivative index down
    pub d_riem_up: Tensor,
    /// `∇_ε R_{αβ}`
    pub d_ricci: Tensor,
    /// `∇_ε R^{αβ}`
    pub d_ricci_up: Tensor,
    /// `∇_ε C_{αβγδ}`
    pub d_weyl: Tensor,
    /// `∇_ζ ∇_ε R^α_{βγδ}`
    pub dd_riem_mixed: Tensor,
    /// `∂_μ R`
    pub d_scalar: Vec<f64>,
    /// `∇_μ ∇_ν R`
    pub dd_scalar: Tensor,
    /// `max |∇^k R^α_{βγδ}|`, `k = 0..=depth`
    pub magnitudes: Vec<f64>,
    pub frame_scale: f64,
    pub christoffel_scale: f64,
    /// `e_a^μ` as `[a, μ]`, a frame with `g(e_a, e_b) = ±δ_ab`.
    pub orthonormal: Tensor,
    /// `max |∇^k R_{αβγδ}|` in the orthonormal frame, `k = 0..=2`.
    pub frame_magnitudes: Vec<f64>,
}

impl PointValues {
    /// Needs a tower of depth ≥ 2.
    pub fn new(pc: &PointCurvature) -> Result<Self> {
        if pc.depth() < 2 {
            return Err(Error::JetBudget { needed: 4, available: pc.frame.order });
        }
        let n = pc.dim();
        let g = pc.frame.g.values();
        let g_inv = pc.frame.g_inv.values();
        let riem_mixed = pc.tower[0].values();
        let riem = riem_mixed.contract_slot(0, &g);
        let riem_up = riem_mixed.contract_slots(&[1, 2, 3], &g_inv);
        let ricci = pc.ricci.values();
        let ricci_mixed = ricci.contract_slot(0, &g_inv);
        let ricci_up = ricci_mixed.contract_slot(1, &g_inv);
        let weyl = pc.weyl.values();
        let weyl_mixed = weyl.contract_slot(0, &g_inv);
        let d_riem_mixed = pc.tower[1].values();
        let d_riem = d_riem_mixed.contract_slot(1, &g);
        let d_riem_up = d_riem_mixed.contract_slots(&[2, 3, 4], &g_inv);
        let d_ricci = Tensor::from_fn(n, |[e, a, b]| (0..n).map(|r| d_riem_mixed.get([e, r, a, r, b])).sum());
        let d_ricci_up = d_ricci.contract_slots(&[1, 2], &g_inv);
        let d_weyl = cov_derivative(&pc.weyl, &pc.frame)?.values();
        let dd_riem_mixed = pc.tower[2].values();

        let scalar_field = {
            let mut t = TensorJet::zeros(n, pc.scalar.order(), &[]);
            t.set_jet(&[], &pc.scalar);
            t
        };
        let d_scalar_jet = cov_derivative(&scalar_field, &pc.frame)?;
        let d_scalar = d_scalar_jet.values().data().to_vec();
        let dd_scalar = cov_derivative(&d_scalar_jet, &pc.frame)?.values();

        let orthonormal = orthonormal_frame(&g);
        let to_frame = |t: &Tensor| (0..t.rank()).fold(t.clone(), |acc, s| acc.contract_slot(s, &orthonormal)).max_abs();
        let frame_magnitudes = vec![to_frame(&riem), to_frame(&d_riem), to_frame(&dd_riem_mixed.contract_slot(2, &g))];

        Ok(Self {
            n,
            g,
            g_inv,
            riem_mixed,
            riem,
            riem_up,
            ricci,
            ricci_mixed,
            ricci_up,
            scalar: pc.scalar.value(),
            weyl,
            weyl_mixed,
            d_riem_mixed,
            d_riem,
            d_riem_up,
            d_ricci,
            d_ricci_up,
            d_weyl,
            dd_riem_mixed,
            d_scalar,
            dd_scalar,
            magnitudes: pc.magnitudes(),
            frame_scale: pc.frame.scale,
            christoffel_scale: pc.frame.christoffel_scale(),
            orthonormal,
            frame_magnitudes,
        })
    }

    /// Largest component of an all-indices-down tensor in the orthonormal frame.
    pub fn frame_max(&self, t: &Tensor) -> f64 {
        (0..t.rank()).fold(t.clone(), |acc, s| acc.contract_slot(s, &self.orthonormal)).max_abs()
    }

    /// [`PointValues::frame_max`] floored by the frame magnitude of `∇^k R`.
    pub fn frame_factor(&self, t: &Tensor, k: usize) -> f64 {
        self.frame_max(t).max(self.frame_magnitudes.get(k).copied().unwrap_or(0.0))
    }

    /// Magnitude of a factor carrying `k` covariant derivatives of the
    /// curvature: its own max entry, floored by `max |∇^k R^α_{βγδ}|`.
    pub fn factor(&self, t: &Tensor, k: usize) -> f64 {
        t.max_abs().max(self.magnitudes.get(k).copied().unwrap_or(0.0))
    }

    /// Tolerance scale for `∇^k R`.
    pub fn derivative_scale(&self, k: usize) -> f64 {
        self.frame_scale * (1.0 + self.christoffel_scale).powi(k as i32)
    }
}

/// `e_a = q_a / √|λ_a|` from the eigenpairs `(λ_a, q_a)` of `g`.
fn orthonormal_frame(g: &Tensor) -> Tensor {
    let n = g.n();
    let m = DMatrix::from_fn(n, n, |i, j| g.get([i, j]));
    let eig = SymmetricEigen::new(m);
    Tensor::from_fn(n, |[a, mu]| eig.eigenvectors[(mu, a)] / eig.eigenvalues[a].abs().sqrt())
}
