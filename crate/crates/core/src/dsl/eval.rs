use nalgebra::{DMatrix, SymmetricEigen};

use super::ast::{BinOp, Expr};
use super::spec::MetricSpec;
use crate::error::{Error, Result};
use crate::jets::Jet;

/// Determinant floor, after row/column equilibration, below which the metric
/// counts as degenerate.
pub const DEGENERATE_DET: f64 = 1e-12;

/// Evaluates `expr` as a jet of `order` at `point`, seeding one jet variable
/// per coordinate.
pub fn eval_expression(expr: &Expr, spec: &MetricSpec, point: &[f64], order: usize) -> Result<Jet> {
    let n = spec.dim();
    if point.len() != n {
        return Err(Error::ShapeMismatch(format!("point has {} coordinates, expected {n}", point.len())));
    }
    let vars = point
        .iter()
        .enumerate()
        .map(|(i, &x)| Jet::variable(i, x, n, order))
        .collect::<Result<Vec<_>>>()?;
    let params = spec.param_values();
    eval_with(expr, &vars, &params, n, order)
}

fn eval_with(expr: &Expr, vars: &[Jet], params: &[f64], n: usize, order: usize) -> Result<Jet> {
    Ok(match expr {
        Expr::Num(v) => Jet::constant(*v, n, order),
        Expr::Coord(i) => vars[*i].clone(),
        Expr::Param(p) => Jet::constant(params[*p], n, order),
        Expr::Neg(a) => eval_with(a, vars, params, n, order)?.scale(-1.0),
        Expr::Pow(a, e) => eval_with(a, vars, params, n, order)?.powi(*e)?,
        Expr::Call(f, a) => eval_with(a, vars, params, n, order)?.apply(*f)?,
        Expr::Binary(op, a, b) => {
            let a = eval_with(a, vars, params, n, order)?;
            let b = eval_with(b, vars, params, n, order)?;
            match op {
                BinOp::Add => a.try_add(&b)?,
                BinOp::Sub => a.try_sub(&b)?,
                BinOp::Mul => a.try_mul(&b)?,
                BinOp::Div => a.try_div(&b)?,
            }
        }
    })
}

/// Plain floating-point evaluation of an expression.
pub fn eval_value(expr: &Expr, point: &[f64], params: &[f64]) -> f64 {
    match expr {
        Expr::Num(v) => *v,
        Expr::Coord(i) => point[*i],
        Expr::Param(p) => params[*p],
        Expr::Neg(a) => -eval_value(a, point, params),
        Expr::Pow(a, e) => eval_value(a, point, params).powi(*e),
        Expr::Call(f, a) => f.eval(eval_value(a, point, params)),
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_value(a, point, params), eval_value(b, point, params));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
    }
}

/// Metric germ at a point: a symmetric grid of component jets.
#[derive(Debug, Clone)]
pub struct MetricGerm {
    pub point: Vec<f64>,
    pub order: usize,
    pub g: Vec<Vec<Jet>>,
    /// Number of negative eigenvalues of the value matrix.
    pub negative_count: usize,
}

impl MetricGerm {
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// One timelike direction, signature (−,+,…,+).
    pub fn is_lorentzian(&self) -> bool {
        self.negative_count == 1
    }

    pub fn values(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.g[i][j].value())
    }
}

/// Number of negative eigenvalues of a symmetric matrix.
pub fn negative_eigenvalue_count(m: &DMatrix<f64>) -> usize {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().filter(|&&e| e < 0.0).count()
}

/// Evaluates every metric component at `point`, checking non-degeneracy.
/// A non-Lorentzian signature is recorded on the germ, not rejected.
pub fn evaluate_metric(spec: &MetricSpec, point: &[f64], order: usize) -> Result<MetricGerm> {
    if order < 2 {
        return Err(Error::JetBudget { needed: 2, available: order });
    }
    if !spec.contains(point) {
        return Err(Error::InvalidSpec(format!("point {point:?} outside the declared domain")));
    }
    let n = spec.dim();
    let zero = Jet::zeros(n, order);
    let mut g = vec![vec![zero; n]; n];
    for (&(i, j), expr) in &spec.components {
        let jet = eval_expression(expr, spec, point, order)
            .map_err(|e| Error::Component { i, j, source: Box::new(e) })?;
        g[j][i] = jet.clone();
        g[i][j] = jet;
    }
    let values = DMatrix::from_fn(n, n, |i, j| g[i][j].value());
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateMetric(point.to_vec()));
    }
    // symmetric row/column equilibration makes the test blind to coordinate units
    let row_max: Vec<f64> = (0..n).map(|i| values.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    if row_max.contains(&0.0) {
        return Err(Error::DegenerateMetric(point.to_vec()));
    }
    let equilibrated = DMatrix::from_fn(n, n, |i, j| values[(i, j)] / (row_max[i] * row_max[j]).sqrt());
    if equilibrated.determinant().abs() < DEGENERATE_DET {
        return Err(Error::DegenerateMetric(point.to_vec()));
    }
    let negative_count = negative_eigenvalue_count(&values);
    Ok(MetricGerm { point: point.to_vec(), order, g, negative_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_metric_file;

    fn spec(text: &str) -> MetricSpec {
        parse_metric_file(text).unwrap()
    }

    #[test]
    fn expression_values() {
        let s = spec("version = 1\nname = s\ndim = 2\ncoords = th ph\ndomain th = 0 3\ng 0 0 = \"1\"\n");
        let e = s.parse_expr("sin(th)^2").unwrap();
        let j = eval_expression(&e, &s, &[std::f64::consts::FRAC_PI_3, 0.0], 2).unwrap();
        assert!((j.value() - 0.75).abs() < 1e-15);

        let s = spec("version = 1\nname = s\ndim = 2\ncoords = t r\nparam m = 1\ng 0 0 = \"1\"\n");
        let e = s.parse_expr("1 - 2*m/r").unwrap();
        assert!((eval_expression(&e, &s, &[0.0, 4.0], 2).unwrap().value() - 0.5).abs() < 1e-15);

        let s = spec("version = 1\nname = s\ndim = 3\ncoords = u x y\ng 0 0 = \"1\"\n");
        let e = s.parse_expr("u*(x^2 - y^2)").unwrap();
        let j = eval_expression(&e, &s, &[1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(j.value(), -5.0);
        assert_eq!(j.derivative(&[1, 0, 0]), -5.0);
        assert_eq!(j.derivative(&[0, 1, 0]), 4.0);
        assert_eq!(j.derivative(&[0, 0, 1]), -6.0);
    }

    #[test]
    fn metric_germs() {
        let mink = spec(
            "version = 1\nname = m\ndim = 4\ncoords = t x y z\ng 0 0 = \"-1\"\ng 1 1 = \"1\"\n\
             g 2 2 = \"1\"\ng 3 3 = \"1\"\n",
        );
        let g = evaluate_metric(&mink, &[0.1, 0.2, -0.3, 0.4], 3).unwrap();
        assert!(g.is_lorentzian());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j { 0.0 } else if i == 0 { -1.0 } else { 1.0 };
                assert_eq!(g.g[i][j].value(), want);
                assert!(g.g[i][j].coeffs()[1..].iter().all(|&c| c == 0.0));
            }
        }

        let sphere = spec(
            "version = 1\nname = s\ndim = 2\ncoords = th ph\ndomain th = 0.2 3\n\
             g 0 0 = \"1\"\ng 1 1 = \"sin(th)^2\"\n",
        );
        let g = evaluate_metric(&sphere, &[std::f64::consts::FRAC_PI_2, 0.0], 3).unwrap();
        assert!((g.g[1][1].value() - 1.0).abs() < 1e-15);
        assert!(g.g[1][1].derivative(&[1, 0]).abs() < 1e-15);
        assert!(!g.is_lorentzian());

        let degenerate = spec("version = 1\nname = d\ndim = 2\ncoords = a b\ng 0 0 = \"a\"\ng 1 1 = \"1\"\n");
        assert!(matches!(evaluate_metric(&degenerate, &[0.0, 0.0], 2), Err(Error::DegenerateMetric(_))));
        assert!(matches!(evaluate_metric(&degenerate, &[0.5, 0.0], 1), Err(Error::JetBudget { .. })));
    }

    #[test]
    fn domain_errors_name_the_component() {
        let s = spec("version = 1\nname = d\ndim = 2\ncoords = a b\ng 0 0 = \"1\"\ng 1 1 = \"log(a)\"\n");
        match evaluate_metric(&s, &[-0.5, 0.0], 2) {
            Err(Error::Component { i: 1, j: 1, source }) => {
                assert!(matches!(*source, Error::FunctionDomain { .. }))
            }
            other => panic!("{other:?}"),
        }
    }
}
