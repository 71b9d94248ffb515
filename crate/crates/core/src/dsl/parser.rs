//! Recursive-descent parser for component expressions.
//!
//! Precedence, tightest first: `^` (integer literal exponent), unary `-`,
//! `* /`, `+ -`. Binary operators are left-associative within a tier.

use super::ast::{BinOp, Expr};
use crate::error::{Error, Result};
use crate::jets::UnaryFn;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    /// 0-based character offset into the expression.
    pos: usize,
}

/// Resolves identifiers while parsing.
pub struct Scope<'a> {
    pub coords: &'a [String],
    pub params: &'a [String],
}

/// Maps expression-relative offsets to file positions.
#[derive(Debug, Clone, Copy)]
pub struct Origin {
    pub line: usize,
    /// 1-based column of the first expression character.
    pub column: usize,
}

impl Default for Origin {
    fn default() -> Self {
        Origin { line: 1, column: 1 }
    }
}

fn err(origin: Origin, pos: usize, message: impl Into<String>) -> Error {
    Error::Parse { line: origin.line, column: origin.column + pos, message: message.into() }
}

fn lex(src: &str, origin: Origin) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| err(origin, start, format!("malformed number `{text}`")))?;
            out.push(Token { tok: Tok::Num(v, text), pos: start });
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos: start });
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(err(origin, start, format!("unexpected character `{c}`"))),
            };
            out.push(Token { tok, pos: start });
            i += 1;
        }
    }
    out.push(Token { tok: Tok::End, pos: chars.len() });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    scope: &'a Scope<'a>,
    origin: Origin,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(err(self.origin, self.pos(), message))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == &Tok::Op('-') {
            // `-3` is a literal unless the literal is the base of a power
            if let Tok::Num(v, _) = self.peek_at(1).clone() {
                if self.peek_at(2) != &Tok::Op('^') {
                    self.bump();
                    self.bump();
                    return Ok(Expr::Num(-v));
                }
            }
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while self.peek() == &Tok::Op('^') {
            self.bump();
            let e = self.exponent()?;
            base = Expr::pow(base, e);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32> {
        let parens = self.peek() == &Tok::LParen;
        if parens {
            self.bump();
        }
        let negative = self.peek() == &Tok::Op('-');
        if negative {
            self.bump();
        }
        let value = match self.peek().clone() {
            Tok::Num(v, text) => {
                if v.fract() != 0.0 || text.contains(['.', 'e', 'E']) || v.abs() > 1e6 {
                    return self.fail(format!("non-integer exponent `{text}`"));
                }
                self.bump();
                v as i32
            }
            _ => return self.fail("exponent must be an integer literal"),
        };
        if parens {
            if self.peek() != &Tok::RParen {
                return self.fail("expected `)` after exponent");
            }
            self.bump();
        }
        Ok(if negative { -value } else { value })
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self.bump();
        match tok.tok {
            Tok::Num(v, _) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != &Tok::RParen {
                    return Err(err(self.origin, tok.pos, "unclosed parenthesis"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek() == &Tok::LParen {
                    let open = self.bump();
                    let f: UnaryFn = name
                        .parse()
                        .map_err(|_| err(self.origin, tok.pos, format!("unknown function `{name}`")))?;
                    let arg = self.expr()?;
                    if self.peek() != &Tok::RParen {
                        return Err(err(self.origin, open.pos, "unclosed parenthesis"));
                    }
                    self.bump();
                    return Ok(Expr::call(f, arg));
                }
                if let Some(i) = self.scope.coords.iter().position(|c| *c == name) {
                    Ok(Expr::Coord(i))
                } else if let Some(i) = self.scope.params.iter().position(|p| *p == name) {
                    Ok(Expr::Param(i))
                } else {
                    Err(err(self.origin, tok.pos, format!("unknown identifier `{name}`")))
                }
            }
            Tok::End => Err(err(self.origin, tok.pos, "unexpected end of expression")),
            Tok::RParen => Err(err(self.origin, tok.pos, "unexpected `)`")),
            Tok::Op(c) => Err(err(self.origin, tok.pos, format!("unexpected operator `{c}`"))),
        }
    }
}

/// Parses one component expression.
pub fn parse_expression(src: &str, scope: &Scope<'_>, origin: Origin) -> Result<Expr> {
    let tokens = lex(src, origin)?;
    let mut p = Parser { tokens, at: 0, scope, origin };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn parse(src: &str) -> Result<Expr> {
        let coords = names(&["th", "x", "y"]);
        let params = names(&["m"]);
        parse_expression(src, &Scope { coords: &coords, params: &params }, Origin::default())
    }

    #[test]
    fn precedence_tiers() {
        // -x^2 = -(x^2)
        assert_eq!(parse("-x^2").unwrap(), Expr::neg(Expr::pow(Expr::Coord(1), 2)));
        // -2^2 keeps the power on the positive literal
        assert_eq!(parse("-2^2").unwrap(), Expr::neg(Expr::pow(Expr::Num(2.0), 2)));
        assert_eq!(
            parse("1 - 2*m/x").unwrap(),
            Expr::binary(
                BinOp::Sub,
                Expr::Num(1.0),
                Expr::binary(
                    BinOp::Div,
                    Expr::binary(BinOp::Mul, Expr::Num(2.0), Expr::Param(0)),
                    Expr::Coord(1)
                )
            )
        );
        assert_eq!(
            parse("x - y - th").unwrap(),
            Expr::binary(
                BinOp::Sub,
                Expr::binary(BinOp::Sub, Expr::Coord(1), Expr::Coord(2)),
                Expr::Coord(0)
            )
        );
        assert_eq!(parse("x^-2").unwrap(), Expr::pow(Expr::Coord(1), -2));
    }

    #[test]
    fn errors_carry_columns() {
        match parse("sin(th") {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 4);
                assert!(message.contains("unclosed"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x^2.5"), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(parse("x^y"), Err(Error::Parse { .. })));
        match parse("2*zz") {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 3);
                assert!(message.contains("unknown identifier"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("foo(x)").is_err());
        assert!(parse("x )").is_err());
    }

    #[test]
    fn printer_round_trips() {
        let coords = names(&["th", "x", "y"]);
        let params = names(&["m"]);
        for src in [
            "sin(th)^2",
            "-(-2)",
            "-(2)",
            "(-2)^2",
            "x - (y - th)",
            "x / (y * th)",
            "(x^2)^3",
            "-x * y + -1",
            "1e-7 * exp(-x^2) / sqrt(1 + m)",
            "x^-3",
            "--x",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_source(&coords, &params);
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
