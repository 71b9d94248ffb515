use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::layout::{Layout, MultiIndex};
use super::univariate::{self, UnaryFn};
use crate::error::{Error, Result};

/// Smallest |value| a jet may have and still be inverted.
pub const RECIP_THRESHOLD: f64 = 1e-12;

/// Truncated multivariate Taylor expansion of a scalar field at a point.
///
/// `coeffs[p]` holds `(∂^α f)/α!` for the multi-index at position `p` of the
/// shared [`Layout`].
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.order == other.order && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zeros(dim: usize, order: usize) -> Self {
        let layout = Layout::get(dim, order);
        let coeffs = vec![0.0; layout.count(order)];
        Self { layout, order, coeffs }
    }

    pub fn constant(value: f64, dim: usize, order: usize) -> Self {
        let mut j = Self::zeros(dim, order);
        j.coeffs[0] = value;
        j
    }

    /// Jet of the `i`-th coordinate function at `value`.
    pub fn variable(i: usize, value: f64, dim: usize, order: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        let mut j = Self::constant(value, dim, order);
        if order >= 1 {
            // degree-1 monomials sit right after the constant, in variable order
            j.coeffs[1 + i] = 1.0;
        }
        Ok(j)
    }

    /// Builds a jet from raw coefficients in layout order.
    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        let layout = Layout::get(dim, order);
        if coeffs.len() != layout.count(order) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                layout.count(order),
                coeffs.len()
            )));
        }
        Ok(Self { layout, order, coeffs })
    }

    pub(crate) fn from_parts(layout: Arc<Layout>, order: usize, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), layout.count(order));
        Self { layout, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `(∂^α f)/α!`; zero beyond the jet's order.
    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        match self.layout.position(alpha) {
            Some(p) if p < self.coeffs.len() => self.coeffs[p],
            _ => 0.0,
        }
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, exponents: &[u8]) -> f64 {
        let alpha = MultiIndex::new(exponents.to_vec());
        self.coeff(&alpha) * alpha.factorial()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops all coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let n = self.layout.count(order);
        Self::from_parts(Arc::clone(&self.layout), order, self.coeffs[..n].to_vec())
    }

    fn check_shape(&self, other: &Jet) -> Result<()> {
        if self.dim() != other.dim() || self.order != other.order {
            return Err(Error::ShapeMismatch(format!(
                "(dim {}, order {}) vs (dim {}, order {})",
                self.dim(),
                self.order,
                other.dim(),
                other.order
            )));
        }
        Ok(())
    }

    fn wider_layout(&self, other: &Jet) -> Arc<Layout> {
        if self.layout.max_order() >= other.layout.max_order() {
            Arc::clone(&self.layout)
        } else {
            Arc::clone(&other.layout)
        }
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self::from_parts(self.wider_layout(other), self.order, coeffs))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.wider_layout(other), self.order, coeffs))
    }

    pub fn scale(&self, s: f64) -> Jet {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Self::from_parts(Arc::clone(&self.layout), self.order, coeffs)
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut r = self.clone();
        r.coeffs[0] += s;
        r
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        Ok(self.mul_to(other, self.order))
    }

    pub(crate) fn mul_to(&self, other: &Jet, order: usize) -> Jet {
        let layout = self.wider_layout(other);
        let mut out = vec![0.0; layout.count(order)];
        layout.mul_acc(&mut out, &self.coeffs, &other.coeffs, order, 1.0);
        Self::from_parts(layout, order, out)
    }

    /// Multiplicative inverse by Newton iteration `r ← r(2 − a r)`, doubling
    /// the number of correct orders per step.
    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.value();
        if !(a0.abs() >= RECIP_THRESHOLD) {
            return Err(Error::NearZeroDivision(a0));
        }
        let mut r = Jet::constant(1.0 / a0, self.dim(), self.order);
        let mut done = 0;
        while done < self.order {
            let target = (2 * done + 1).min(self.order);
            let ar = self.mul_to(&r, target);
            let two_minus = ar.scale(-1.0).add_scalar(2.0);
            r = r.truncate(target).mul_to(&two_minus, target);
            done = target;
        }
        Ok(r)
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet> {
        self.check_shape(other)?;
        Ok(self.mul_to(&other.recip()?, self.order))
    }

    /// Integer power; negative exponents go through [`Jet::recip`].
    pub fn powi(&self, exp: i32) -> Result<Jet> {
        if exp < 0 {
            return self.recip()?.powi(-exp);
        }
        let mut result = Jet::constant(1.0, self.dim(), self.order);
        let mut base = self.clone();
        let mut e = exp as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_to(&base, self.order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_to(&base, self.order);
            }
        }
        Ok(result)
    }

    /// Composes a library function with this jet: Horner evaluation of the
    /// function's Taylor polynomial about `value()` in the nilpotent part.
    pub fn apply(&self, f: UnaryFn) -> Result<Jet> {
        let series = univariate::taylor_coefficients(f, self.value(), self.order)?;
        let h = self.add_scalar(-self.value());
        let mut r = Jet::constant(series[self.order], self.dim(), self.order);
        for k in (0..self.order).rev() {
            r = r.mul_to(&h, self.order).add_scalar(series[k]);
        }
        Ok(r)
    }

    /// Jet of `∂f/∂x^i`, one order lower.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim() });
        }
        if self.order == 0 {
            return Err(Error::OrderZero);
        }
        let order = self.order - 1;
        let mut out = vec![0.0; self.layout.count(order)];
        self.layout.partial_into(&mut out, &self.coeffs, i, order);
        Ok(Self::from_parts(Arc::clone(&self.layout), order, out))
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).expect("jet add")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).expect("jet sub")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).expect("jet mul")
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, order: usize, i: usize, v: f64) -> Jet {
        Jet::variable(i, v, dim, order).unwrap()
    }

    #[test]
    fn variable_seeds() {
        assert_eq!(x(1, 2, 0, 2.0).coeffs(), &[2.0, 1.0, 0.0]);
        let y = x(2, 1, 1, 0.0);
        assert_eq!(y.value(), 0.0);
        assert_eq!(y.derivative(&[0, 1]), 1.0);
        assert_eq!(y.derivative(&[1, 0]), 0.0);
        let sq = &x(1, 2, 0, 2.0) * &x(1, 2, 0, 2.0);
        assert_eq!(sq.coeffs(), &[4.0, 4.0, 1.0]);
        assert!(matches!(Jet::variable(2, 0.0, 2, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn linear_ops() {
        let one = Jet::constant(1.0, 1, 2);
        let t = x(1, 2, 0, 0.0);
        assert_eq!((&(&one + &t) + &(&one - &t)).coeffs(), &[2.0, 0.0, 0.0]);
        let a = &one + &t;
        assert!((&a - &a).coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(t.scale(3.0).coeffs()[1], 3.0);
        assert!(one.try_add(&Jet::constant(1.0, 1, 3)).is_err());
        assert!(one.try_mul(&Jet::constant(1.0, 2, 2)).is_err());
    }

    #[test]
    fn product_truncates() {
        for (order, expect) in [(2usize, vec![1.0, 0.0, -1.0]), (1, vec![1.0, 0.0])] {
            let t = x(1, order, 0, 0.0);
            let p = &t.add_scalar(1.0) * &t.scale(-1.0).add_scalar(1.0);
            assert_eq!(p.coeffs(), expect.as_slice());
        }
    }

    #[test]
    fn geometric_series() {
        let a = x(1, 3, 0, 0.0).scale(-1.0).add_scalar(1.0);
        let r = a.recip().unwrap();
        for c in r.coeffs() {
            assert!((c - 1.0).abs() < 1e-15);
        }
        let back = r.recip().unwrap();
        for (p, q) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((p - q).abs() < 1e-14);
        }
        assert!(matches!(Jet::constant(1e-13, 1, 2).recip(), Err(Error::NearZeroDivision(_))));
    }

    #[test]
    fn partial_basics() {
        let t = x(1, 2, 0, 3.0);
        let d = (&t * &t).partial(0).unwrap();
        assert_eq!(d.order(), 1);
        assert_eq!(d.coeffs(), &[6.0, 2.0]);
        assert_eq!(Jet::constant(1.0, 2, 0).partial(0), Err(Error::OrderZero));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let t = x(2, 4, 0, 1.5).try_add(&x(2, 4, 1, -0.5)).unwrap();
        let p3 = t.powi(3).unwrap();
        let direct = &(&t * &t) * &t;
        for (a, b) in p3.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        let inv2 = t.powi(-2).unwrap();
        let one = &inv2 * &(&t * &t);
        assert!((one.value() - 1.0).abs() < 1e-14);
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-12));
    }
}
