use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Library functions available to metric expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnaryFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryFn {
    pub const ALL: [UnaryFn; 9] = [
        UnaryFn::Sin,
        UnaryFn::Cos,
        UnaryFn::Tan,
        UnaryFn::Exp,
        UnaryFn::Log,
        UnaryFn::Sqrt,
        UnaryFn::Sinh,
        UnaryFn::Cosh,
        UnaryFn::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
            UnaryFn::Tanh => "tanh",
        }
    }

    /// Plain `f64` evaluation.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            UnaryFn::Sin => x.sin(),
            UnaryFn::Cos => x.cos(),
            UnaryFn::Tan => x.tan(),
            UnaryFn::Exp => x.exp(),
            UnaryFn::Log => x.ln(),
            UnaryFn::Sqrt => x.sqrt(),
            UnaryFn::Sinh => x.sinh(),
            UnaryFn::Cosh => x.cosh(),
            UnaryFn::Tanh => x.tanh(),
        }
    }
}

impl fmt::Display for UnaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnaryFn {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        UnaryFn::ALL.iter().copied().find(|f| f.name() == s).ok_or(())
    }
}

fn domain_error(f: UnaryFn, x: f64) -> Error {
    Error::FunctionDomain { func: f.name().to_string(), value: x }
}

fn series_div(num: &[f64], den: &[f64]) -> Vec<f64> {
    let len = num.len();
    let mut q = vec![0.0; len];
    for k in 0..len {
        let mut s = num[k];
        for j in 1..=k {
            s -= den[j] * q[k - j];
        }
        q[k] = s / den[0];
    }
    q
}

fn cycle(vals: [f64; 4], order: usize) -> Vec<f64> {
    let mut fact = 1.0;
    (0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            vals[k % 4] / fact
        })
        .collect()
}

/// `tanh(y + h) = 1 − 2w / (e^{2h} + w)` with `w = e^{−2y}`, `y = |x|`, and
/// oddness for negative `x`. Unlike `sinh / cosh` this keeps full relative
/// accuracy in the derivatives where `tanh` saturates.
fn tanh_coefficients(x: f64, order: usize) -> Vec<f64> {
    let w = (-2.0 * x.abs()).exp();
    let mut den = cycle([1.0; 4], order);
    for (k, d) in den.iter_mut().enumerate() {
        *d *= 2f64.powi(k as i32);
    }
    den[0] += w;
    let mut num = vec![0.0; order + 1];
    num[0] = -2.0 * w;
    let mut q = series_div(&num, &den);
    q[0] = x.abs().tanh();
    if x < 0.0 {
        for (k, c) in q.iter_mut().enumerate() {
            if k % 2 == 0 {
                *c = -*c;
            }
        }
    }
    q
}

/// Taylor coefficients `f^(k)(x)/k!` for `k = 0..=order`.
pub fn taylor_coefficients(f: UnaryFn, x: f64, order: usize) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(domain_error(f, x));
    }
    let (s, c) = x.sin_cos();
    let out = match f {
        UnaryFn::Sin => cycle([s, c, -s, -c], order),
        UnaryFn::Cos => cycle([c, -s, -c, s], order),
        UnaryFn::Sinh => cycle([x.sinh(), x.cosh(), x.sinh(), x.cosh()], order),
        UnaryFn::Cosh => cycle([x.cosh(), x.sinh(), x.cosh(), x.sinh()], order),
        UnaryFn::Exp => {
            let e = x.exp();
            cycle([e; 4], order)
        }
        UnaryFn::Tan => {
            if c.abs() < 1e-12 {
                return Err(domain_error(f, x));
            }
            series_div(&cycle([s, c, -s, -c], order), &cycle([c, -s, -c, s], order))
        }
        UnaryFn::Tanh => tanh_coefficients(x, order),
        UnaryFn::Log => {
            if x <= 0.0 {
                return Err(domain_error(f, x));
            }
            (0..=order)
                .map(|k| {
                    if k == 0 {
                        x.ln()
                    } else {
                        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                        sign / (k as f64 * x.powi(k as i32))
                    }
                })
                .collect()
        }
        UnaryFn::Sqrt => {
            if x <= 0.0 {
                return Err(domain_error(f, x));
            }
            // binomial series of (x + h)^(1/2)
            let mut out = Vec::with_capacity(order + 1);
            let mut binom = 1.0;
            let root = x.sqrt();
            for k in 0..=order {
                if k > 0 {
                    binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
                }
                out.push(binom * root / x.powi(k as i32));
            }
            out
        }
    };
    Ok(out)
}
