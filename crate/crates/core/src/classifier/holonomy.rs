//! Infinitesimal holonomy at a point: the Lie algebra spanned by curvature
//! endomorphisms and their first two covariant derivatives, and the vectors
//! and symmetric 2-tensors it annihilates.
//!
//! Kernel elements are parallel candidates only: annihilation at one point
//! is necessary for a parallel field, not sufficient.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::geometry::PointValues;
use crate::invariants::Tolerances;

/// Relative singular-value threshold for rank decisions.
pub const RANK_RATIO: f64 = 1e-7;
/// `|g(v, v)|` bound, after unit Euclidean normalization, below which `v` is null.
pub const NULL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Causal {
    Null,
    Timelike,
    Spacelike,
}

impl Causal {
    pub fn of(norm: f64) -> Self {
        if norm.abs() <= NULL_TOL {
            Self::Null
        } else if norm < 0.0 {
            Self::Timelike
        } else {
            Self::Spacelike
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Null => "null",
            Self::Timelike => "timelike",
            Self::Spacelike => "spacelike",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelVector {
    pub components: Vec<f64>,
    pub norm: f64,
    pub causal: Causal,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyReport {
    pub generator_count: usize,
    pub algebra_dim: usize,
    pub closure_iterations: usize,
    pub tangent_kernel: Vec<KernelVector>,
    /// The kernel contains a nonzero null vector (degenerate or indefinite
    /// restricted metric).
    pub contains_null: bool,
    /// Dimension of the annihilated symmetric 2-tensors, not counting `g`.
    pub sym2_kernel_dim: usize,
}

impl HolonomyReport {
    pub fn kernel_dim(&self) -> usize {
        self.tangent_kernel.len()
    }
}

/// Orthonormal basis (as rows) of the span of `rows`, dropping directions
/// with singular value below `RANK_RATIO · σ_max` or `floor`.
fn row_span(rows: &[Vec<f64>], width: usize, floor: f64) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(rows.len(), width, |r, c| rows[r][c]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = (RANK_RATIO * smax).max(floor);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cut)
        .map(|(i, _)| v_t.row(i).iter().cloned().collect())
        .collect()
}

/// Null space of the stacked matrices `rows` (each `width` long), as columns.
fn null_space(rows: &[Vec<f64>], width: usize) -> Vec<DVector<f64>> {
    if rows.is_empty() {
        return (0..width).map(|i| DVector::from_fn(width, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
    }
    let mut m = DMatrix::from_fn(rows.len(), width, |r, c| rows[r][c]);
    if rows.len() < width {
        // pad so that the SVD returns a full right basis
        m = m.resize_vertically(width, 0.0);
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_RATIO * smax;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut || smax == 0.0)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

fn commutator(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let am = DMatrix::from_row_slice(n, n, a);
    let bm = DMatrix::from_row_slice(n, n, b);
    let c = &am * &bm - &bm * &am;
    (0..n * n).map(|k| c[(k / n, k % n)]).collect()
}

/// Endomorphisms `M^μ_ν` (row-major) generating the infinitesimal holonomy.
pub fn generators(pv: &PointValues) -> Vec<Vec<f64>> {
    let n = pv.n;
    let mut out = Vec::new();
    let mut mat = |f: &dyn Fn(usize, usize) -> f64| {
        out.push((0..n * n).map(|k| f(k / n, k % n)).collect::<Vec<f64>>());
    };
    for a in 0..n {
        for b in a + 1..n {
            mat(&|m, v| pv.riem_mixed.get([m, v, a, b]));
            for c in 0..n {
                mat(&|m, v| pv.d_riem_mixed.get([c, m, v, a, b]));
                for d in 0..n {
                    mat(&|m, v| pv.dd_riem_mixed.get([d, c, m, v, a, b]));
                }
            }
        }
    }
    out
}

pub fn holonomy_kernel(pv: &PointValues, tol: Tolerances) -> HolonomyReport {
    let n = pv.n;
    let gens = generators(pv);
    let floor = tol.abs + tol.rel * pv.frame_scale;
    let mut basis = row_span(&gens, n * n, floor);
    let cap = n * (n - 1) / 2;
    let mut iterations = 0;
    while iterations < cap && basis.len() > 1 {
        iterations += 1;
        let mut rows = basis.clone();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                rows.push(commutator(&basis[i], &basis[j], n));
            }
        }
        // basis rows are unit vectors, so commutator noise sits far below 1
        let next = row_span(&rows, n * n, tol.abs);
        let done = next.len() == basis.len();
        basis = next;
        if done {
            break;
        }
    }

    // tangent kernel: M v = 0 for every basis element
    let mut rows = Vec::with_capacity(basis.len() * n);
    for m in &basis {
        for r in 0..n {
            rows.push(m[r * n..(r + 1) * n].to_vec());
        }
    }
    let kernel = null_space(&rows, n);
    let g = DMatrix::from_fn(n, n, |i, j| pv.g.get([i, j]));
    let (tangent_kernel, contains_null) = if kernel.is_empty() {
        (Vec::new(), false)
    } else {
        let k = DMatrix::from_columns(&kernel);
        let restricted = k.transpose() * &g * &k;
        let eig = SymmetricEigen::new(restricted);
        let mut vectors = Vec::new();
        let (mut pos, mut neg, mut zero) = (false, false, false);
        for i in 0..eig.eigenvalues.len() {
            let v = &k * eig.eigenvectors.column(i);
            let v = v.normalize();
            let norm = (v.transpose() * &g * &v)[(0, 0)];
            let causal = Causal::of(norm);
            match causal {
                Causal::Null => zero = true,
                Causal::Timelike => neg = true,
                Causal::Spacelike => pos = true,
            }
            vectors.push(KernelVector { components: v.iter().cloned().collect(), norm, causal });
        }
        (vectors, zero || (pos && neg))
    };

    // symmetric 2-tensors: (M·h)_{μν} = −M^ρ_μ h_{ρν} − M^ρ_ν h_{μρ}
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let mut sym_rows = Vec::new();
    for m in &basis {
        let at = |r: usize, c: usize| m[r * n + c];
        for &(mu, nu) in &pairs {
            let mut row = vec![0.0; np];
            for (p, &(i, j)) in pairs.iter().enumerate() {
                // coefficient of h_{ij} (= h_{ji}) in (M·h)_{μν}
                let mut s = 0.0;
                let e = |a: usize, b: usize| if (a == i && b == j) || (a == j && b == i) { 1.0 } else { 0.0 };
                for r in 0..n {
                    s -= at(r, mu) * e(r, nu) + at(r, nu) * e(mu, r);
                }
                row[p] = s;
            }
            sym_rows.push(row);
        }
    }
    let sym_kernel = null_space(&sym_rows, np).len();

    HolonomyReport {
        generator_count: gens.len(),
        algebra_dim: basis.len(),
        closure_iterations: iterations,
        tangent_kernel,
        contains_null,
        sym2_kernel_dim: sym_kernel.saturating_sub(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn causal_thresholds() {
        assert_eq!(Causal::of(5e-8), Causal::Null);
        assert_eq!(Causal::of(-0.3), Causal::Timelike);
        assert_eq!(Causal::of(0.3), Causal::Spacelike);
    }

    #[test]
    fn null_space_of_empty_is_everything() {
        assert_eq!(null_space(&[], 3).len(), 3);
        assert_eq!(null_space(&[vec![1.0, 0.0, 0.0]], 3).len(), 2);
    }

    #[test]
    fn commutator_of_rotation_generators() {
        // [L_x, L_y] = L_z in so(3)
        let lx = [0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0];
        let ly = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        let lz = vec![0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(commutator(&lx, &ly, 3), lz);
    }
}
