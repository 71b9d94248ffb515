use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Exponent vector of a monomial `x^α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exponents: Vec<u8>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u8>) -> Self {
        Self { exponents }
    }

    pub fn zero(dim: usize) -> Self {
        Self { exponents: vec![0; dim] }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut exponents = vec![0; dim];
        exponents[i] = 1;
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    /// `α!` = product of the factorials of the exponents.
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product()
    }
}

/// Number of monomials of degree ≤ `order` in `dim` variables, C(dim+order, order).
pub fn coeff_count(dim: usize, order: usize) -> usize {
    let mut c: usize = 1;
    for k in 1..=order {
        c = c * (dim + k) / k;
    }
    c
}

/// Graded enumeration of the monomials of one dimension up to a maximum order.
///
/// Monomials are sorted by degree and, within a degree, by reverse
/// lexicographic order of exponents (`x0^d` first). The enumeration for a
/// lower order is a prefix of the enumeration for a higher one, so a jet of
/// order `m` is exactly the first `coeff_count(dim, m)` coefficients of any
/// longer jet.
#[derive(Debug)]
pub struct Layout {
    dim: usize,
    max_order: usize,
    indices: Vec<MultiIndex>,
    degrees: Vec<usize>,
    counts: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
    /// `products[i][j]` = position of `α_i + α_j`, for `j < counts[max_order - deg_i]`.
    products: Vec<Vec<u32>>,
    /// `shifts[v][i]` = position of `α_i + e_v`, for `deg_i < max_order`.
    shifts: Vec<Vec<u32>>,
}

fn monomials_of_degree(dim: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(dim: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == dim {
            prefix.push(remaining as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u8);
            rec(dim, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl Layout {
    fn build(dim: usize, max_order: usize) -> Self {
        assert!(dim >= 1, "jet dimension must be positive");
        let mut indices = Vec::new();
        let mut degrees = Vec::new();
        let mut counts = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            for e in monomials_of_degree(dim, d) {
                indices.push(MultiIndex::new(e));
                degrees.push(d);
            }
            counts.push(indices.len());
        }
        let lookup: HashMap<MultiIndex, usize> =
            indices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

        let add = |a: &MultiIndex, b: &MultiIndex| -> MultiIndex {
            MultiIndex::new(a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect())
        };
        let products = indices
            .iter()
            .zip(&degrees)
            .map(|(a, &da)| {
                indices[..counts[max_order - da]]
                    .iter()
                    .map(|b| lookup[&add(a, b)] as u32)
                    .collect()
            })
            .collect();
        let shifts = (0..dim)
            .map(|v| {
                let e = MultiIndex::unit(dim, v);
                indices
                    .iter()
                    .zip(&degrees)
                    .map(|(a, &da)| if da < max_order { lookup[&add(a, &e)] as u32 } else { u32::MAX })
                    .collect()
            })
            .collect();

        Self { dim, max_order, indices, degrees, counts, lookup, products, shifts }
    }

    /// Shared layout for `dim` variables covering at least `order`.
    pub fn get(dim: usize, order: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(l) = guard.get(&dim) {
            if l.max_order >= order {
                return Arc::clone(l);
            }
        }
        let l = Arc::new(Layout::build(dim, order));
        guard.insert(dim, Arc::clone(&l));
        l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn count(&self, order: usize) -> usize {
        self.counts[order]
    }

    pub fn index(&self, pos: usize) -> &MultiIndex {
        &self.indices[pos]
    }

    pub fn degree(&self, pos: usize) -> usize {
        self.degrees[pos]
    }

    pub fn position(&self, m: &MultiIndex) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// `out += scale * (a * b)` truncated at `order`. `out` must hold
    /// `count(order)` coefficients; shorter operands are zero-padded.
    pub(crate) fn mul_acc(&self, out: &mut [f64], a: &[f64], b: &[f64], order: usize, scale: f64) {
        let n = self.counts[order].min(a.len());
        for i in 0..n {
            let ai = a[i];
            if ai == 0.0 {
                continue;
            }
            let ai = ai * scale;
            let row = &self.products[i];
            let lim = self.counts[order - self.degrees[i]].min(b.len());
            for j in 0..lim {
                let bj = b[j];
                if bj != 0.0 {
                    out[row[j] as usize] += ai * bj;
                }
            }
        }
    }

    /// Coefficients of `∂f/∂x^v` at `order`, from coefficients of `f` at `order + 1`.
    pub(crate) fn partial_into(&self, out: &mut [f64], a: &[f64], v: usize, order: usize) {
        let shift = &self.shifts[v];
        for p in 0..self.counts[order] {
            let q = shift[p] as usize;
            let k = self.indices[p].exponents[v] as f64 + 1.0;
            out[p] = k * a[q];
        }
    }
}
