//! Cross-checks between verdicts that the theory ties together.

use serde::Serialize;

use super::report::PointReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl FindingStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: usize,
    pub coords: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub id: &'static str,
    pub name: &'static str,
    pub status: FindingStatus,
    /// Points where the premise held.
    pub applicable_points: usize,
    pub witness: Option<Witness>,
}

type Check = fn(&PointReport) -> Option<Result<(), String>>;

fn proper_two_symmetric_has_null_kernel(p: &PointReport) -> Option<Result<(), String>> {
    let c = &p.classification;
    if !(c.two_symmetric.holds && !c.symmetric.holds) {
        return None;
    }
    Some(if p.holonomy.contains_null {
        Ok(())
    } else {
        Err(format!("2-symmetric, not symmetric, tangent kernel of dimension {} has no null vector", p.holonomy.kernel_dim()))
    })
}

fn generic_semisymmetric_is_constant_curvature(p: &PointReport) -> Option<Result<(), String>> {
    let c = &p.classification;
    if !(c.semisymmetric.holds && c.generic) {
        return None;
    }
    Some(if c.constant_curvature.holds {
        Ok(())
    } else {
        Err(format!("generic and semisymmetric, constant-curvature residual {:e}", c.constant_curvature.residual))
    })
}

fn invariants_vanish_without_null_kernel(p: &PointReport) -> Option<Result<(), String>> {
    let c = &p.classification;
    if !(c.two_symmetric.holds && !p.holonomy.contains_null) {
        return None;
    }
    if p.invariants.order_one_zero() {
        return Some(Ok(()));
    }
    let bad: Vec<&str> = p
        .invariants
        .entries
        .iter()
        .filter(|e| e.order == 1 && !e.zero && !e.name.starts_with("grad_scalar_curvature"))
        .map(|e| e.name.as_str())
        .collect();
    Some(Err(format!("nonzero first-order invariants: {}", bad.join(", "))))
}

fn scalar_gradient_is_null(p: &PointReport) -> Option<Result<(), String>> {
    let grad = p.invariants.get("grad_scalar_curvature")?;
    if !(p.classification.two_symmetric.holds && !grad.zero) {
        return None;
    }
    let norm = p.invariants.get("grad_scalar_curvature_squared")?;
    let hess = p.invariants.get("hessian_scalar_curvature")?;
    Some(if norm.zero && hess.zero {
        Ok(())
    } else {
        Err(format!(
            "gradient of R has squared norm {:e} and Hessian max {:e}",
            norm.value.max_abs(),
            hess.value.max_abs()
        ))
    })
}

fn hierarchy_ordering(p: &PointReport) -> Option<Result<(), String>> {
    let h = p.classification.hierarchy();
    let names = ["constant_curvature", "symmetric", "two_symmetric", "semisymmetric"];
    for i in 0..3 {
        if h[i] && !h[i + 1] {
            return Some(Err(format!("{} holds but {} does not", names[i], names[i + 1])));
        }
    }
    Some(Ok(()))
}

const CHECKS: [(&str, &str, Check); 5] = [
    ("a", "proper_two_symmetric_has_null_kernel", proper_two_symmetric_has_null_kernel),
    ("b", "generic_semisymmetric_is_constant_curvature", generic_semisymmetric_is_constant_curvature),
    ("c", "invariants_vanish_without_null_kernel", invariants_vanish_without_null_kernel),
    ("d", "scalar_gradient_is_null", scalar_gradient_is_null),
    ("e", "hierarchy_ordering", hierarchy_ordering),
];

/// Evaluates every finding over the points. A finding fails at the first
/// point where its premise holds and its conclusion does not.
pub fn theorem_consistency(points: &[PointReport]) -> Vec<Finding> {
    CHECKS
        .iter()
        .map(|&(id, name, check)| {
            let mut applicable_points = 0;
            let mut witness = None;
            for p in points {
                match check(p) {
                    None => {}
                    Some(Ok(())) => applicable_points += 1,
                    Some(Err(detail)) => {
                        applicable_points += 1;
                        if witness.is_none() {
                            witness = Some(Witness { point: p.index, coords: p.coords.clone(), detail });
                        }
                    }
                }
            }
            let status = if witness.is_some() {
                FindingStatus::Fail
            } else if applicable_points == 0 {
                FindingStatus::NotApplicable
            } else {
                FindingStatus::Pass
            };
            Finding { id, name, status, applicable_points, witness }
        })
        .collect()
}
