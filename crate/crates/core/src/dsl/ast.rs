use std::fmt::Write;

use serde::Serialize;

use crate::jets::UnaryFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree with identifiers resolved to coordinate or parameter slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(UnaryFn, Box<Expr>),
}

const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, e: i32) -> Expr {
        Expr::Pow(Box::new(a), e)
    }

    pub fn call(f: UnaryFn, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => PREC_NEG,
            Expr::Num(_) | Expr::Coord(_) | Expr::Param(_) | Expr::Call(..) => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Pow(..) => PREC_POW,
        }
    }

    /// True if the expression references coordinate `i`.
    pub fn uses_coord(&self, i: usize) -> bool {
        match self {
            Expr::Coord(c) => *c == i,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_coord(i),
            Expr::Binary(_, a, b) => a.uses_coord(i) || b.uses_coord(i),
        }
    }

    /// Rewrites coordinate and parameter slots.
    pub fn remap(&self, coord: &dyn Fn(usize) -> usize, param: &dyn Fn(usize) -> usize) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Coord(c) => Expr::Coord(coord(*c)),
            Expr::Param(p) => Expr::Param(param(*p)),
            Expr::Neg(a) => Expr::neg(a.remap(coord, param)),
            Expr::Pow(a, e) => Expr::pow(a.remap(coord, param), *e),
            Expr::Call(f, a) => Expr::call(*f, a.remap(coord, param)),
            Expr::Binary(op, a, b) => Expr::binary(*op, a.remap(coord, param), b.remap(coord, param)),
        }
    }

    /// Replaces every occurrence of coordinate `i` by `with`.
    pub fn substitute_coord(&self, i: usize, with: &Expr) -> Expr {
        match self {
            Expr::Coord(c) if *c == i => with.clone(),
            Expr::Num(_) | Expr::Coord(_) | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute_coord(i, with)),
            Expr::Pow(a, e) => Expr::pow(a.substitute_coord(i, with), *e),
            Expr::Call(f, a) => Expr::call(*f, a.substitute_coord(i, with)),
            Expr::Binary(op, a, b) => {
                Expr::binary(*op, a.substitute_coord(i, with), b.substitute_coord(i, with))
            }
        }
    }

    /// Prints with the minimal parentheses that re-parse to the same tree.
    pub fn to_source(&self, coords: &[String], params: &[String]) -> String {
        let mut s = String::new();
        self.write_source(&mut s, coords, params);
        s
    }

    fn write_child(&self, out: &mut String, coords: &[String], params: &[String], parens: bool) {
        if parens {
            out.push('(');
            self.write_source(out, coords, params);
            out.push(')');
        } else {
            self.write_source(out, coords, params);
        }
    }

    fn write_source(&self, out: &mut String, coords: &[String], params: &[String]) {
        match self {
            Expr::Num(v) => {
                let _ = write!(out, "{v}");
            }
            Expr::Coord(c) => out.push_str(&coords[*c]),
            Expr::Param(p) => out.push_str(&params[*p]),
            Expr::Neg(a) => {
                out.push('-');
                // a bare literal after `-` would fold into a negative literal
                let parens = a.precedence() < PREC_NEG || matches!(**a, Expr::Num(_));
                a.write_child(out, coords, params, parens);
            }
            Expr::Pow(a, e) => {
                a.write_child(out, coords, params, a.precedence() < PREC_ATOM);
                let _ = write!(out, "^{e}");
            }
            Expr::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_source(out, coords, params);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.write_child(out, coords, params, a.precedence() < p);
                let _ = write!(out, " {} ", op.symbol());
                b.write_child(out, coords, params, b.precedence() <= p);
            }
        }
    }
}
