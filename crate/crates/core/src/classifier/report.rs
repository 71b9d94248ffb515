use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::consistency::{theorem_consistency, Finding, FindingStatus};
use super::holonomy::{holonomy_kernel, HolonomyReport};
use super::identities::{identity_suite, IdentityResult};
use super::{classify_point, PointClassification};
use crate::dsl::MetricSpec;
use crate::error::{Error, Result};
use crate::geometry::{PointCurvature, PointValues};
use crate::invariants::{scalar_invariants, InvariantReport, Tolerances};

/// Highest supported metric jet order.
pub const MAX_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub points: usize,
    pub seed: u64,
    pub order: usize,
    /// Highest `k` for the `∇^k R = 0` checks; defaults to `order − 2`.
    pub k: Option<usize>,
    pub tol: Tolerances,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { points: 20, seed: 42, order: 4, k: None, tol: Tolerances::default() }
    }
}

impl SamplingConfig {
    /// Number of covariant derivatives of Riemann to compute (at least 2).
    pub fn depth(&self) -> usize {
        self.k.unwrap_or(self.order.saturating_sub(2)).max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidSpec("at least one sample point is required".into()));
        }
        if !(2..=MAX_ORDER).contains(&self.order) {
            return Err(Error::InvalidSpec(format!("order must be between 2 and {MAX_ORDER}, got {}", self.order)));
        }
        if !(self.tol.rel > 0.0 && self.tol.abs > 0.0) {
            return Err(Error::InvalidSpec("tolerances must be positive".into()));
        }
        let depth = self.depth();
        if self.order < depth + 2 {
            return Err(Error::JetBudget { needed: depth + 2, available: self.order });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecSummary {
    pub name: String,
    pub dim: usize,
    pub coords: Vec<String>,
    pub params: Vec<(String, f64)>,
}

impl SpecSummary {
    pub fn new(spec: &MetricSpec) -> Self {
        Self { name: spec.name.clone(), dim: spec.dim(), coords: spec.coords.clone(), params: spec.params.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub coords: Vec<f64>,
    pub classification: PointClassification,
    pub holonomy: HolonomyReport,
    pub invariants: InvariantReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KHolds {
    pub k: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateVerdicts {
    pub points_evaluated: usize,
    pub points_skipped: usize,
    pub skipped: Vec<SkippedPoint>,
    pub constant_curvature: bool,
    pub symmetric: bool,
    pub two_symmetric: bool,
    pub k_symmetric: Vec<KHolds>,
    pub semisymmetric: bool,
    pub ricci_flat: bool,
    pub generic: bool,
    pub lorentzian: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomySummary {
    pub kernel_dim_min: usize,
    pub kernel_dim_max: usize,
    pub algebra_dim_max: usize,
    pub sym2_kernel_dim_min: usize,
    /// Every point has a null vector among its parallel candidates.
    pub null_candidate_everywhere: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantSummaryEntry {
    pub name: String,
    pub order: usize,
    pub max_abs: f64,
    pub all_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantSummary {
    pub entries: Vec<InvariantSummaryEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub spec: SpecSummary,
    pub config: SamplingConfig,
    pub points: Vec<PointReport>,
    pub aggregate: AggregateVerdicts,
    pub holonomy: HolonomySummary,
    pub consistency: Vec<Finding>,
    pub invariants: InvariantSummary,
}

impl ClassificationReport {
    pub fn findings_pass(&self) -> bool {
        self.consistency.iter().all(|f| f.status != FindingStatus::Fail)
    }
}

/// Draws `cfg.points` points uniformly from the domain box.
pub fn sample_points(spec: &MetricSpec, cfg: &SamplingConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.points)
        .map(|_| spec.domain.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect())
        .collect()
}

fn skippable(e: &Error) -> bool {
    match e {
        Error::DegenerateMetric(_) | Error::FunctionDomain { .. } | Error::NearZeroDivision(_) => true,
        Error::Component { source, .. } => skippable(source),
        _ => false,
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("CURVKIT_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok());
    match threads.filter(|&n| n > 0).map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

/// Full analysis of one point.
pub fn evaluate_point(spec: &MetricSpec, index: usize, coords: &[f64], cfg: &SamplingConfig) -> Result<PointReport> {
    let pc = PointCurvature::at(spec, coords, cfg.order, cfg.depth())?;
    let pv = PointValues::new(&pc)?;
    Ok(PointReport {
        index,
        coords: coords.to_vec(),
        classification: classify_point(&pc, &pv, cfg.tol),
        holonomy: holonomy_kernel(&pv, cfg.tol),
        invariants: scalar_invariants(&pv, cfg.tol),
    })
}

/// Runs `f` at every sampled point in parallel, keeping point order and
/// separating skipped (degenerate or out-of-domain-function) points.
fn sample_and_run<T: Send>(
    spec: &MetricSpec,
    cfg: &SamplingConfig,
    f: impl Fn(usize, &[f64]) -> Result<T> + Sync + Send,
) -> Result<(Vec<T>, Vec<SkippedPoint>)> {
    cfg.validate()?;
    spec.validate()?;
    let points = sample_points(spec, cfg);
    let results: Vec<Result<T>> = with_pool(|| points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect());
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(e) if skippable(&e) => skipped.push(SkippedPoint { index: i, coords: points[i].clone(), reason: e.to_string() }),
            Err(e) => return Err(e),
        }
    }
    if ok.is_empty() {
        return Err(Error::NoValidPoints { skipped: skipped.len() });
    }
    Ok((ok, skipped))
}

/// Samples the domain and classifies the metric.
pub fn aggregate(spec: &MetricSpec, cfg: &SamplingConfig) -> Result<ClassificationReport> {
    let (points, skipped) = sample_and_run(spec, cfg, |i, p| evaluate_point(spec, i, p, cfg))?;
    let all = |f: &dyn Fn(&PointReport) -> bool| points.iter().all(f);
    let depth = points[0].classification.k_symmetric.len();
    let aggregate = AggregateVerdicts {
        points_evaluated: points.len(),
        points_skipped: skipped.len(),
        skipped,
        constant_curvature: all(&|p| p.classification.constant_curvature.holds),
        symmetric: all(&|p| p.classification.symmetric.holds),
        two_symmetric: all(&|p| p.classification.two_symmetric.holds),
        k_symmetric: (0..depth)
            .map(|i| KHolds {
                k: i + 1,
                holds: all(&|p: &PointReport| p.classification.k_symmetric[i].verdict.holds),
            })
            .collect(),
        semisymmetric: all(&|p| p.classification.semisymmetric.holds),
        ricci_flat: all(&|p| p.classification.ricci_flat.holds),
        generic: all(&|p| p.classification.generic),
        lorentzian: all(&|p| p.classification.lorentzian),
    };
    let holonomy = HolonomySummary {
        kernel_dim_min: points.iter().map(|p| p.holonomy.kernel_dim()).min().unwrap_or(0),
        kernel_dim_max: points.iter().map(|p| p.holonomy.kernel_dim()).max().unwrap_or(0),
        algebra_dim_max: points.iter().map(|p| p.holonomy.algebra_dim).max().unwrap_or(0),
        sym2_kernel_dim_min: points.iter().map(|p| p.holonomy.sym2_kernel_dim).min().unwrap_or(0),
        null_candidate_everywhere: all(&|p| p.holonomy.contains_null),
    };
    let invariants = InvariantSummary {
        entries: points[0]
            .invariants
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| InvariantSummaryEntry {
                name: e.name.clone(),
                order: e.order,
                max_abs: points.iter().map(|p| p.invariants.entries[k].value.max_abs()).fold(0.0, f64::max),
                all_zero: points.iter().all(|p| p.invariants.entries[k].zero),
            })
            .collect(),
    };
    let consistency = theorem_consistency(&points);
    Ok(ClassificationReport {
        spec: SpecSummary::new(spec),
        config: *cfg,
        points,
        aggregate,
        holonomy,
        consistency,
        invariants,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    pub two_symmetric: bool,
    /// False when the point is not 2-symmetric and the run was not forced.
    pub ran: bool,
    pub results: Vec<IdentityResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub spec: SpecSummary,
    pub config: SamplingConfig,
    pub force: bool,
    pub points: Vec<IdentityPoint>,
    pub skipped: Vec<SkippedPoint>,
    /// Identities failing at one or more points, in suite order.
    pub failing: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }

    /// Largest residual/scale ratio of `name` over the points where it ran.
    pub fn worst(&self, name: &str) -> Option<&IdentityResult> {
        self.points
            .iter()
            .flat_map(|p| p.results.iter().filter(|r| r.name == name))
            .max_by(|a, b| (a.residual / a.scale.max(f64::MIN_POSITIVE)).total_cmp(&(b.residual / b.scale.max(f64::MIN_POSITIVE))))
    }
}

/// Runs the identity suite at every sampled 2-symmetric point, or at every
/// point when `force` is set.
pub fn identity_report(spec: &MetricSpec, cfg: &SamplingConfig, force: bool) -> Result<IdentityReport> {
    let (points, skipped) = sample_and_run(spec, cfg, |index, coords| {
        let pc = PointCurvature::at(spec, coords, cfg.order, cfg.depth())?;
        let pv = PointValues::new(&pc)?;
        let two_symmetric = classify_point(&pc, &pv, cfg.tol).two_symmetric.holds;
        let ran = two_symmetric || force;
        let results = if ran { identity_suite(&pv, cfg.tol) } else { Vec::new() };
        Ok(IdentityPoint { index, coords: coords.to_vec(), two_symmetric, ran, results })
    })?;
    let mut failing: Vec<String> = Vec::new();
    if let Some(first) = points.iter().find(|p| p.ran) {
        for (k, r) in first.results.iter().enumerate() {
            if points.iter().filter(|p| p.ran).any(|p| !p.results[k].pass) {
                failing.push(r.name.clone());
            }
        }
    }
    Ok(IdentityReport { spec: SpecSummary::new(spec), config: *cfg, force, points, skipped, failing })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    pub invariants: InvariantReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsRun {
    pub spec: SpecSummary,
    pub config: SamplingConfig,
    pub points: Vec<InvariantPoint>,
    pub skipped: Vec<SkippedPoint>,
}

/// Invariants at every sampled point.
pub fn invariants_report(spec: &MetricSpec, cfg: &SamplingConfig) -> Result<InvariantsRun> {
    let (points, skipped) = sample_and_run(spec, cfg, |index, coords| {
        let pc = PointCurvature::at(spec, coords, cfg.order, cfg.depth())?;
        let pv = PointValues::new(&pc)?;
        Ok(InvariantPoint { index, coords: coords.to_vec(), invariants: scalar_invariants(&pv, cfg.tol) })
    })?;
    Ok(InvariantsRun { spec: SpecSummary::new(spec), config: *cfg, points, skipped })
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    pub holonomy: HolonomyReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyRun {
    pub spec: SpecSummary,
    pub config: SamplingConfig,
    pub points: Vec<HolonomyPoint>,
    pub skipped: Vec<SkippedPoint>,
}

/// Holonomy kernels at every sampled point.
pub fn holonomy_report(spec: &MetricSpec, cfg: &SamplingConfig) -> Result<HolonomyRun> {
    let (points, skipped) = sample_and_run(spec, cfg, |index, coords| {
        let pc = PointCurvature::at(spec, coords, cfg.order, cfg.depth())?;
        let pv = PointValues::new(&pc)?;
        Ok(HolonomyPoint { index, coords: coords.to_vec(), holonomy: holonomy_kernel(&pv, cfg.tol) })
    })?;
    Ok(HolonomyRun { spec: SpecSummary::new(spec), config: *cfg, points, skipped })
}
