//! Dense small tensors: jet-valued fields ([`TensorJet`]) and plain values at
//! a point ([`Tensor`]). Components are stored row-major over `n^rank`
//! entries; index 0 is the slowest.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{Jet, Layout};

/// Index position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    Up,
    Down,
}

fn flat(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Decodes a flat component number into its index tuple.
pub fn unflatten(n: usize, rank: usize, mut c: usize, out: &mut [usize]) {
    for k in (0..rank).rev() {
        out[k] = c % n;
        c /= n;
    }
}

/// Jet-valued tensor field germ.
#[derive(Clone, Debug)]
pub struct TensorJet {
    layout: Arc<Layout>,
    n: usize,
    order: usize,
    valence: Vec<Slot>,
    stride: usize,
    data: Vec<f64>,
}

impl TensorJet {
    pub fn zeros(n: usize, order: usize, valence: &[Slot]) -> Self {
        let layout = Layout::get(n, order);
        let stride = layout.count(order);
        let len = n.pow(valence.len() as u32) * stride;
        Self { layout, n, order, valence: valence.to_vec(), stride, data: vec![0.0; len] }
    }

    /// Builds a rank-2 tensor from a grid of jets.
    pub fn from_grid(grid: &[Vec<Jet>], valence: [Slot; 2]) -> Result<Self> {
        let n = grid.len();
        let order = grid
            .first()
            .and_then(|r| r.first())
            .map(Jet::order)
            .ok_or_else(|| Error::ShapeMismatch("empty grid".into()))?;
        let mut t = Self::zeros(n, order, &valence);
        for (i, row) in grid.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch("grid is not square".into()));
            }
            for (j, jet) in row.iter().enumerate() {
                if jet.dim() != n || jet.order() != order {
                    return Err(Error::ShapeMismatch(format!("component ({i}, {j})")));
                }
                t.set_jet(&[i, j], jet);
            }
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn valence(&self) -> &[Slot] {
        &self.valence
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn component_count(&self) -> usize {
        self.n.pow(self.rank() as u32)
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        &self.data[c * self.stride..(c + 1) * self.stride]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.stride..(c + 1) * self.stride]
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        flat(self.n, idx)
    }

    pub fn at(&self, idx: &[usize]) -> &[f64] {
        self.comp(self.index(idx))
    }

    pub fn jet(&self, idx: &[usize]) -> Jet {
        Jet::from_parts(Arc::clone(&self.layout), self.order, self.at(idx).to_vec())
    }

    pub fn set_jet(&mut self, idx: &[usize], jet: &Jet) {
        let c = self.index(idx);
        let s = self.stride;
        self.comp_mut(c).copy_from_slice(&jet.coeffs()[..s]);
    }

    /// Copies component `from` into `to`, scaled.
    pub(crate) fn copy_comp(&mut self, from: usize, to: usize, scale: f64) {
        let s = self.stride;
        for k in 0..s {
            self.data[to * s + k] = scale * self.data[from * s + k];
        }
    }

    /// Same tensor with coefficients above `order` dropped.
    pub fn truncate(&self, order: usize) -> TensorJet {
        let order = order.min(self.order);
        if order == self.order {
            return self.clone();
        }
        let stride = self.layout.count(order);
        let mut data = Vec::with_capacity(self.component_count() * stride);
        for c in 0..self.component_count() {
            data.extend_from_slice(&self.comp(c)[..stride]);
        }
        TensorJet {
            layout: Arc::clone(&self.layout),
            n: self.n,
            order,
            valence: self.valence.clone(),
            stride,
            data,
        }
    }

    /// Component-wise `∂/∂x^v`, one order lower.
    pub fn partial(&self, v: usize) -> Result<TensorJet> {
        if self.order == 0 {
            return Err(Error::OrderZero);
        }
        let mut out = TensorJet::zeros(self.n, self.order - 1, &self.valence);
        let s = out.stride;
        for c in 0..self.component_count() {
            let src = self.comp(c);
            self.layout.partial_into(&mut out.data[c * s..(c + 1) * s], src, v, self.order - 1);
        }
        Ok(out)
    }

    /// `out[c] += scale * a * b`, truncated at `self.order`.
    pub(crate) fn mul_acc(&mut self, c: usize, a: &[f64], b: &[f64], scale: f64) {
        let s = self.stride;
        let TensorJet { layout, data, order, .. } = self;
        layout.mul_acc(&mut data[c * s..(c + 1) * s], a, b, *order, scale);
    }

    pub(crate) fn add_acc(&mut self, c: usize, a: &[f64], scale: f64) {
        let s = self.stride;
        for (o, x) in self.data[c * s..(c + 1) * s].iter_mut().zip(a) {
            *o += scale * x;
        }
    }

    /// Contracts `slot` with a rank-2 `metric` (`g` to lower, `g⁻¹` to raise).
    fn move_slot(&self, slot: usize, metric: &TensorJet, to: Slot) -> TensorJet {
        let n = self.n;
        let rank = self.rank();
        let mut valence = self.valence.clone();
        valence[slot] = to;
        let mut out = TensorJet::zeros(n, self.order, &valence);
        let metric = metric.truncate(self.order);
        let step = n.pow((rank - 1 - slot) as u32);
        let mut idx = vec![0; rank];
        for c in 0..self.component_count() {
            unflatten(n, rank, c, &mut idx);
            let i = idx[slot];
            let base = c - i * step;
            for r in 0..n {
                out.mul_acc(c, metric.at(&[i, r]), self.comp(base + r * step), 1.0);
            }
        }
        out
    }

    pub fn lower(&self, slot: usize, g: &TensorJet) -> TensorJet {
        debug_assert_eq!(self.valence[slot], Slot::Up);
        self.move_slot(slot, g, Slot::Down)
    }

    pub fn raise(&self, slot: usize, g_inv: &TensorJet) -> TensorJet {
        debug_assert_eq!(self.valence[slot], Slot::Down);
        self.move_slot(slot, g_inv, Slot::Up)
    }

    /// Base-point values of every component.
    pub fn values(&self) -> Tensor {
        Tensor {
            n: self.n,
            rank: self.rank(),
            data: (0..self.component_count()).map(|c| self.data[c * self.stride]).collect(),
        }
    }

    /// Largest coefficient magnitude over all components and orders.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_diff(&self, other: &TensorJet) -> f64 {
        let order = self.order.min(other.order);
        let s = self.layout.count(order);
        (0..self.component_count())
            .map(|c| {
                self.comp(c)[..s]
                    .iter()
                    .zip(&other.comp(c)[..s])
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// Plain tensor values at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Self { n, rank, data: vec![0.0; n.pow(rank as u32)] }
    }

    pub fn from_fn<const R: usize>(n: usize, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let mut t = Self::zeros(n, R);
        let mut idx = [0usize; R];
        for c in 0..t.data.len() {
            unflatten(n, R, c, &mut idx);
            t.data[c] = f(idx);
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get<const R: usize>(&self, idx: [usize; R]) -> f64 {
        debug_assert_eq!(R, self.rank);
        self.data[flat(self.n, &idx)]
    }

    #[inline]
    pub fn set<const R: usize>(&mut self, idx: [usize; R], v: f64) {
        debug_assert_eq!(R, self.rank);
        let c = flat(self.n, &idx);
        self.data[c] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_diff(&self, other: &Tensor) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, s: f64) -> Tensor {
        Tensor { n: self.n, rank: self.rank, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Contracts `slot` with the rank-2 `metric` (lowering with `g`, raising
    /// with `g⁻¹`).
    pub fn contract_slot(&self, slot: usize, metric: &Tensor) -> Tensor {
        let n = self.n;
        let step = n.pow((self.rank - 1 - slot) as u32);
        let mut out = Tensor::zeros(n, self.rank);
        let mut idx = vec![0; self.rank];
        for c in 0..self.data.len() {
            unflatten(n, self.rank, c, &mut idx);
            let i = idx[slot];
            let base = c - i * step;
            out.data[c] = (0..n).map(|r| metric.get([i, r]) * self.data[base + r * step]).sum();
        }
        out
    }

    /// Applies [`Tensor::contract_slot`] to each listed slot.
    pub fn contract_slots(&self, slots: &[usize], metric: &Tensor) -> Tensor {
        slots.iter().fold(self.clone(), |t, &s| t.contract_slot(s, metric))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_indexing() {
        let t = Tensor::from_fn(3, |[a, b, c]| (100 * a + 10 * b + c) as f64);
        assert_eq!(t.get([2, 0, 1]), 201.0);
        let mut idx = [0; 3];
        unflatten(3, 3, 2 * 9 + 1, &mut idx);
        assert_eq!(idx, [2, 0, 1]);
    }

    #[test]
    fn slot_contraction() {
        let g = Tensor::from_fn(2, |[i, j]| if i == j { [2.0, 3.0][i] } else { 0.0 });
        let v = Tensor::from_fn(2, |[a, b]| (a * 2 + b + 1) as f64);
        let lowered = v.contract_slot(1, &g);
        assert_eq!(lowered.get([0, 0]), 2.0);
        assert_eq!(lowered.get([1, 1]), 12.0);
    }
}
