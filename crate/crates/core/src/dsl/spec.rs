use std::collections::BTreeMap;
use std::fmt::Write;

use super::ast::{BinOp, Expr};
use super::parser::{parse_expression, Origin, Scope};
use crate::error::{Error, Result};
use crate::jets::UnaryFn;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_DOMAIN: (f64, f64) = (-1.0, 1.0);

/// A parsed, fully resolved metric definition.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub coords: Vec<String>,
    pub params: Vec<(String, f64)>,
    /// Upper-triangular components `(i, j)` with `i ≤ j`; absent entries are 0.
    pub components: BTreeMap<(usize, usize), Expr>,
    pub domain: Vec<(f64, f64)>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl MetricSpec {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn param_values(&self) -> Vec<f64> {
        self.params.iter().map(|(_, v)| *v).collect()
    }

    /// Component `(i, j)` in either index order.
    pub fn component(&self, i: usize, j: usize) -> Option<&Expr> {
        self.components.get(&(i.min(j), i.max(j)))
    }

    /// Parses an expression against this spec's identifiers.
    pub fn parse_expr(&self, src: &str) -> Result<Expr> {
        let params = self.param_names();
        parse_expression(src, &Scope { coords: &self.coords, params: &params }, Origin::default())
    }

    /// Checks identifier hygiene, component indices and domain ordering.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be ≥ 2, got {n}")));
        }
        if self.domain.len() != n {
            return Err(Error::InvalidSpec("domain/coords length mismatch".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in self.coords.iter().chain(self.params.iter().map(|(p, _)| p)) {
            if !is_identifier(name) {
                return Err(Error::InvalidSpec(format!("invalid identifier `{name}`")));
            }
            if name.parse::<UnaryFn>().is_ok() {
                return Err(Error::InvalidSpec(format!("identifier `{name}` shadows a function")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate identifier `{name}`")));
            }
        }
        for &(i, j) in self.components.keys() {
            if i > j || j >= n {
                return Err(Error::InvalidSpec(format!("bad component index ({i}, {j})")));
            }
        }
        for (k, &(lo, hi)) in self.domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidSpec(format!(
                    "bad domain for `{}`: [{lo}, {hi}]",
                    self.coords[k]
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point.iter().zip(&self.domain).all(|(x, (lo, hi))| {
                let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
                *x >= lo - slack && *x <= hi + slack
            })
    }

    pub fn domain_center(&self) -> Vec<f64> {
        self.domain.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Same geometry in the coordinate `x_i = factor · x_i'`.
    pub fn rescaled(&self, i: usize, factor: f64) -> Result<MetricSpec> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim() });
        }
        if factor == 0.0 || !factor.is_finite() {
            return Err(Error::InvalidSpec("rescaling factor must be finite and non-zero".into()));
        }
        let with = Expr::binary(BinOp::Mul, Expr::Num(factor), Expr::Coord(i));
        let mut out = self.clone();
        out.components = self
            .components
            .iter()
            .map(|(&(a, b), e)| {
                let mut e = e.substitute_coord(i, &with);
                let power = (a == i) as i32 + (b == i) as i32;
                if power > 0 {
                    e = Expr::binary(BinOp::Mul, Expr::Num(factor.powi(power)), e);
                }
                ((a, b), e)
            })
            .collect();
        let (lo, hi) = self.domain[i];
        let (a, b) = (lo / factor, hi / factor);
        out.domain[i] = (a.min(b), a.max(b));
        Ok(out)
    }

    /// Serializes to the line-based metric file format.
    pub fn to_file_string(&self) -> String {
        let params = self.param_names();
        let mut s = String::new();
        let _ = writeln!(s, "version = {FORMAT_VERSION}");
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "dim = {}", self.dim());
        let _ = writeln!(s, "coords = {}", self.coords.join(" "));
        for (p, v) in &self.params {
            let _ = writeln!(s, "param {p} = {v}");
        }
        for (c, (lo, hi)) in self.coords.iter().zip(&self.domain) {
            let _ = writeln!(s, "domain {c} = {lo} {hi}");
        }
        for (&(i, j), e) in &self.components {
            let _ = writeln!(s, "g {i} {j} = \"{}\"", e.to_source(&self.coords, &params));
        }
        s
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

struct PendingComponent {
    i: usize,
    j: usize,
    src: String,
    origin: Origin,
}

fn char_col(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

/// Parses a metric file (format version 1).
pub fn parse_metric_file(text: &str) -> Result<MetricSpec> {
    let mut version: Option<u32> = None;
    let mut name: Option<String> = None;
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(Vec<String>, usize)> = None;
    let mut params: Vec<(String, f64)> = Vec::new();
    let mut domains: Vec<(String, f64, f64, usize)> = Vec::new();
    let mut pending: Vec<PendingComponent> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let perr = |col: usize, msg: String| Error::Parse { line: line_no, column: col, message: msg };
        let eq = line.find('=').ok_or_else(|| perr(1, "expected `key = value`".into()))?;
        let key: Vec<&str> = line[..eq].split_whitespace().collect();
        let value_raw = &line[eq + 1..];
        let value = value_raw.trim();
        let value_col = char_col(line, eq + 1 + (value_raw.len() - value_raw.trim_start().len()));

        match key.as_slice() {
            ["version"] => {
                let v: u32 = value
                    .parse()
                    .map_err(|_| perr(value_col, format!("bad version `{value}`")))?;
                if v != FORMAT_VERSION {
                    return Err(perr(value_col, format!("unsupported format version {v}")));
                }
                version = Some(v);
            }
            ["name"] => {
                let v = value.trim_matches('"').trim();
                if v.is_empty() {
                    return Err(perr(value_col, "empty name".into()));
                }
                name = Some(v.to_string());
            }
            ["dim"] => {
                let v: usize =
                    value.parse().map_err(|_| perr(value_col, format!("bad dimension `{value}`")))?;
                dim = Some((v, line_no));
            }
            ["coords"] => {
                let list: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                coords = Some((list, line_no));
            }
            ["param", id] => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| perr(value_col, format!("bad parameter value `{value}`")))?;
                if params.iter().any(|(p, _)| p == id) {
                    return Err(perr(1, format!("duplicate parameter `{id}`")));
                }
                params.push((id.to_string(), v));
            }
            ["domain", id] => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let nums: Vec<f64> = parts.iter().filter_map(|p| p.parse().ok()).collect();
                if parts.len() != 2 || nums.len() != 2 {
                    return Err(perr(value_col, "domain needs two reals".into()));
                }
                domains.push((id.to_string(), nums[0], nums[1], line_no));
            }
            ["g", a, b] => {
                let i: usize = a.parse().map_err(|_| perr(1, format!("bad index `{a}`")))?;
                let j: usize = b.parse().map_err(|_| perr(1, format!("bad index `{b}`")))?;
                let (i, j) = (i.min(j), i.max(j));
                if !(value.len() >= 2 && value.starts_with('"') && value.ends_with('"')) {
                    return Err(perr(value_col, "expression must be double-quoted".into()));
                }
                if pending.iter().any(|p| p.i == i && p.j == j) {
                    return Err(perr(1, format!("duplicate symmetric entry ({i}, {j})")));
                }
                pending.push(PendingComponent {
                    i,
                    j,
                    src: value[1..value.len() - 1].to_string(),
                    origin: Origin { line: line_no, column: value_col + 1 },
                });
            }
            _ => return Err(perr(1, format!("unknown key `{}`", key.join(" ")))),
        }
    }

    if version.is_none() {
        return Err(Error::InvalidSpec("missing `version`".into()));
    }
    let name = name.ok_or_else(|| Error::InvalidSpec("missing `name`".into()))?;
    let (dim, dim_line) = dim.ok_or_else(|| Error::InvalidSpec("missing `dim`".into()))?;
    let (coords, _) = coords.ok_or_else(|| Error::InvalidSpec("missing `coords`".into()))?;
    if coords.len() != dim {
        return Err(Error::Parse {
            line: dim_line,
            column: 1,
            message: format!("dim/coords length mismatch: dim = {dim}, {} coords", coords.len()),
        });
    }

    let mut domain = vec![DEFAULT_DOMAIN; dim];
    for (id, lo, hi, line) in domains {
        let k = coords.iter().position(|c| *c == id).ok_or_else(|| Error::Parse {
            line,
            column: 1,
            message: format!("unknown identifier `{id}` in domain"),
        })?;
        domain[k] = (lo, hi);
    }

    let param_names: Vec<String> = params.iter().map(|(p, _)| p.clone()).collect();
    let scope = Scope { coords: &coords, params: &param_names };
    let mut components = BTreeMap::new();
    for p in pending {
        if p.j >= dim {
            return Err(Error::Parse {
                line: p.origin.line,
                column: 1,
                message: format!("component index ({}, {}) out of range", p.i, p.j),
            });
        }
        components.insert((p.i, p.j), parse_expression(&p.src, &scope, p.origin)?);
    }

    let spec = MetricSpec { name, coords, params, components, domain };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = "version = 1\nname = sphere\ndim = 2\ncoords = th ph\n\
        domain th = 0.2 2.9\ng 0 0 = \"1\"\ng 1 1 = \"sin(th)^2\"\n";

    #[test]
    fn parses_sphere() {
        let s = parse_metric_file(SPHERE).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.coords, vec!["th", "ph"]);
        assert_eq!(s.domain, vec![(0.2, 2.9), (-1.0, 1.0)]);
        assert!(s.component(0, 1).is_none());
        assert_eq!(s.component(1, 1), Some(&Expr::pow(Expr::call(UnaryFn::Sin, Expr::Coord(0)), 2)));
    }

    #[test]
    fn rejects_duplicate_symmetric_entry() {
        let text = "version = 1\nname = x\ndim = 2\ncoords = a b\ng 0 1 = \"-1\"\ng 1 0 = \"-1\"\n";
        match parse_metric_file(text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 6);
                assert!(message.contains("duplicate symmetric entry"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_expression_column_in_file() {
        let text = "version = 1\nname = x\ndim = 2\ncoords = th ph\ng 0 0 = \"sin(th\"\n";
        match parse_metric_file(text) {
            // `g 0 0 = "` is 9 characters, so `sin` starts at column 10 and `(` at 13
            Err(Error::Parse { line: 5, column, message }) => {
                assert_eq!(column, 13);
                assert!(message.contains("unclosed"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        let bad_dim = "version = 1\nname = x\ndim = 3\ncoords = a b\n";
        assert!(matches!(parse_metric_file(bad_dim), Err(Error::Parse { line: 3, .. })));
        let unknown = "version = 1\nname = x\ndim = 2\ncoords = a b\ng 0 0 = \"c\"\n";
        assert!(matches!(parse_metric_file(unknown), Err(Error::Parse { .. })));
        let missing = "name = x\ndim = 2\ncoords = a b\n";
        assert!(matches!(parse_metric_file(missing), Err(Error::InvalidSpec(_))));
        let clash = "version = 1\nname = x\ndim = 2\ncoords = a sin\n";
        assert!(parse_metric_file(clash).is_err());
    }

    #[test]
    fn emit_reparses_identically() {
        let text = "version = 1 # comment\nname = s\ndim = 2\ncoords = th ph\nparam m = 0.25\n\
            domain th = 0.2 2.9\ng 0 0 = \"1 - 2*m/th\"\ng 0 1 = \"-0.5*th\"\ng 1 1 = \"sin(th)^2\"\n";
        let s = parse_metric_file(text).unwrap();
        let emitted = s.to_file_string();
        let again = parse_metric_file(&emitted).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.to_file_string(), emitted);
    }
}
