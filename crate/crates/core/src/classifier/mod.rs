//! Classification in the hierarchy
//! constant curvature ⊂ symmetric ⊂ 2-symmetric ⊂ semisymmetric.

mod consistency;
mod holonomy;
mod identities;
mod report;

use serde::Serialize;

pub use consistency::{theorem_consistency, Finding, FindingStatus, Witness};
pub use holonomy::{generators, holonomy_kernel, Causal, HolonomyReport, KernelVector, NULL_TOL, RANK_RATIO};
pub use identities::{identity_suite, semisymmetry_residual, IdentityResult, SEMISYMMETRY};
pub use report::{
    aggregate, evaluate_point, holonomy_report, identity_report, invariants_report, sample_points, AggregateVerdicts,
    ClassificationReport, HolonomyPoint, HolonomyRun, HolonomySummary, IdentityPoint, IdentityReport, InvariantPoint,
    InvariantSummary, InvariantSummaryEntry, InvariantsRun, KHolds, PointReport, SamplingConfig, SkippedPoint,
    SpecSummary, MAX_ORDER,
};

use crate::geometry::{PointCurvature, PointValues};
use crate::invariants::{CurvatureOperator, Tolerances};
use crate::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub residual: f64,
    pub scale: f64,
}

impl Verdict {
    pub fn new(residual: f64, scale: f64, tol: Tolerances) -> Self {
        Self { holds: tol.is_zero(residual, scale), residual, scale }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSymmetry {
    pub k: usize,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointClassification {
    pub constant_curvature: Verdict,
    pub symmetric: Verdict,
    pub two_symmetric: Verdict,
    /// `∇^k R = 0` for every `k` the jet budget allows.
    pub k_symmetric: Vec<KSymmetry>,
    pub semisymmetric: Verdict,
    pub ricci_flat: Verdict,
    pub generic: bool,
    pub curvature_operator: CurvatureOperator,
    pub lorentzian: bool,
    pub scale: f64,
}

impl PointClassification {
    pub fn k_symmetric(&self, k: usize) -> Option<bool> {
        self.k_symmetric.iter().find(|s| s.k == k).map(|s| s.verdict.holds)
    }

    /// Table order: constant curvature, symmetric, 2-symmetric, semisymmetric.
    pub fn hierarchy(&self) -> [bool; 4] {
        [
            self.constant_curvature.holds,
            self.symmetric.holds,
            self.two_symmetric.holds,
            self.semisymmetric.holds,
        ]
    }
}

/// `max |R_{αβγδ} − K(g_{αγ}g_{βδ} − g_{αδ}g_{βγ})|` with `K = R / (n(n−1))`.
fn constant_curvature_residual(pv: &PointValues) -> (f64, f64) {
    let n = pv.n;
    let k = pv.scalar / (n * (n - 1)) as f64;
    let g = &pv.g;
    let model = Tensor::from_fn(n, |[a, b, c, d]| k * (g.get([a, c]) * g.get([b, d]) - g.get([a, d]) * g.get([b, c])));
    let scale = pv.factor(&pv.riem, 0).max(k.abs() * g.max_abs() * g.max_abs());
    (pv.riem.max_diff(&model), scale)
}

/// Classifies one point. `pc` must carry at least two derivative levels.
pub fn classify_point(pc: &PointCurvature, pv: &PointValues, tol: Tolerances) -> PointClassification {
    let (res, scale) = constant_curvature_residual(pv);
    let constant_curvature = Verdict::new(res, scale, tol);
    let k_symmetric: Vec<KSymmetry> = (1..=pc.depth())
        .map(|k| KSymmetry { k, verdict: Verdict::new(pc.tower[k].values().max_abs(), pv.derivative_scale(k), tol) })
        .collect();
    let symmetric = k_symmetric[0].verdict;
    let two_symmetric = k_symmetric[1].verdict;
    let (res, scale) = semisymmetry_residual(pv);
    let semisymmetric = Verdict::new(res, scale, tol);
    let ricci_flat = Verdict::new(pv.ricci.max_abs(), pv.factor(&pv.ricci, 0), tol);
    let op = CurvatureOperator::new(pv);
    PointClassification {
        constant_curvature,
        symmetric,
        two_symmetric,
        k_symmetric,
        semisymmetric,
        ricci_flat,
        generic: op.generic,
        curvature_operator: op,
        lorentzian: pc.frame.lorentzian,
        scale: pv.frame_scale,
    }
}
