//! Metric constructors and the builtin reference metrics with their known
//! classifications.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::classifier::{ClassificationReport, MAX_ORDER};
use crate::dsl::{
    evaluate_metric, negative_eigenvalue_count, parse_expression, BinOp, Expr, MetricSpec, Origin, Scope,
    DEFAULT_DOMAIN,
};
use crate::error::{Error, Result};

/// Brinkmann line element `−2du(dv + H du + W_i dx^i) + g_ij dx^i dx^j` in
/// coordinates `(u, v, x^i..)`.
#[derive(Debug, Clone, Default)]
pub struct BrinkmannParams {
    pub name: String,
    pub transverse_coords: Vec<String>,
    pub h: String,
    /// One entry per transverse coordinate; empty means `W = 0`.
    pub w: Vec<String>,
    /// Transverse metric entries `(i, j)`, `i ≤ j`; empty means `δ_ij`.
    pub transverse: BTreeMap<(usize, usize), String>,
    pub params: Vec<(String, f64)>,
    /// Domain per coordinate `(u, v, x^i..)`; empty means the default box.
    pub domain: Vec<(f64, f64)>,
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Mul, a, b)
}

fn add(a: Option<Expr>, b: Expr) -> Expr {
    match a {
        Some(a) => Expr::binary(BinOp::Add, a, b),
        None => b,
    }
}

pub fn brinkmann_build(p: &BrinkmannParams) -> Result<MetricSpec> {
    let m = p.transverse_coords.len();
    let mut coords = vec!["u".to_string(), "v".to_string()];
    coords.extend(p.transverse_coords.iter().cloned());
    let params: Vec<String> = p.params.iter().map(|(k, _)| k.clone()).collect();
    let scope = Scope { coords: &coords, params: &params };
    let parse = |src: &str| -> Result<Expr> {
        let e = parse_expression(src, &scope, Origin::default())?;
        if e.uses_coord(1) {
            return Err(Error::VDependence(src.to_string()));
        }
        Ok(e)
    };
    if !p.w.is_empty() && p.w.len() != m {
        return Err(Error::InvalidSpec(format!("expected {m} W components, got {}", p.w.len())));
    }
    let mut components = BTreeMap::new();
    components.insert((0, 1), Expr::Num(-1.0));
    let h = parse(&p.h)?;
    if h != Expr::Num(0.0) {
        components.insert((0, 0), mul(Expr::Num(-2.0), h));
    }
    for (i, w) in p.w.iter().enumerate() {
        let w = parse(w)?;
        if w != Expr::Num(0.0) {
            components.insert((0, i + 2), Expr::neg(w));
        }
    }
    if p.transverse.is_empty() {
        for i in 0..m {
            components.insert((i + 2, i + 2), Expr::Num(1.0));
        }
    } else {
        for (&(i, j), src) in &p.transverse {
            if i > j || j >= m {
                return Err(Error::InvalidSpec(format!("bad transverse index ({i}, {j})")));
            }
            components.insert((i + 2, j + 2), parse(src)?);
        }
    }
    let domain = if p.domain.is_empty() { vec![DEFAULT_DOMAIN; m + 2] } else { p.domain.clone() };
    let spec = MetricSpec { name: p.name.clone(), coords, params: p.params.clone(), components, domain };
    spec.validate()?;
    Ok(spec)
}

/// Symmetric matrix of polynomials in `u`: `coefficients[i][j][k]` multiplies `u^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveProfile {
    pub coefficients: Vec<Vec<Vec<f64>>>,
}

impl PlaneWaveProfile {
    /// Diagonal profile from one polynomial per transverse direction.
    pub fn diagonal(entries: &[&[f64]]) -> Self {
        let m = entries.len();
        let coefficients = (0..m)
            .map(|i| (0..m).map(|j| if i == j { entries[i].to_vec() } else { Vec::new() }).collect())
            .collect();
        Self { coefficients }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// Polynomial degree of `A(u)`; the zero profile has degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .flatten()
            .filter_map(|p| p.iter().rposition(|&c| c != 0.0))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().flatten().flatten().all(|&c| c == 0.0)
    }

    /// `tr A(u) ≡ 0`.
    pub fn traceless(&self) -> bool {
        let len = self.coefficients.iter().enumerate().map(|(i, r)| r[i].len()).max().unwrap_or(0);
        (0..len).all(|k| {
            self.coefficients.iter().enumerate().map(|(i, r)| r[i].get(k).copied().unwrap_or(0.0)).sum::<f64>() == 0.0
        })
    }

    fn validate(&self) -> Result<()> {
        let m = self.dim();
        for (i, row) in self.coefficients.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidSpec("profile matrix is not square".into()));
            }
            for j in 0..m {
                let (a, b) = (&row[j], &self.coefficients[j][i]);
                let len = a.len().max(b.len());
                let same = (0..len).all(|k| a.get(k).copied().unwrap_or(0.0) == b.get(k).copied().unwrap_or(0.0));
                if !same {
                    return Err(Error::InvalidSpec(format!("profile is not symmetric at ({i}, {j})")));
                }
            }
        }
        let degree = self.degree();
        if degree > MAX_ORDER - 2 {
            return Err(Error::DegreeOverBudget { degree, max: MAX_ORDER - 2 });
        }
        Ok(())
    }
}

/// Expected classification; `None` means not recorded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub constant_curvature: Option<bool>,
    pub symmetric: Option<bool>,
    pub two_symmetric: Option<bool>,
    pub semisymmetric: Option<bool>,
    pub ricci_flat: Option<bool>,
    pub generic: Option<bool>,
    /// Smallest `k ≥ 1` with `∇^k R = 0`.
    pub k_symmetric_from: Option<usize>,
    /// The tangent kernel contains a null vector.
    pub null_kernel: Option<bool>,
}

impl Expected {
    pub fn is_verified(&self) -> bool {
        *self != Expected::default()
    }

    /// Names of recorded expectations that `report` contradicts.
    pub fn mismatches(&self, report: &ClassificationReport) -> Vec<String> {
        let a = &report.aggregate;
        let mut out = Vec::new();
        let mut check = |name: &str, want: Option<bool>, got: bool| {
            if let Some(w) = want {
                if w != got {
                    out.push(format!("{name}: expected {w}, got {got}"));
                }
            }
        };
        check("constant_curvature", self.constant_curvature, a.constant_curvature);
        check("symmetric", self.symmetric, a.symmetric);
        check("two_symmetric", self.two_symmetric, a.two_symmetric);
        check("semisymmetric", self.semisymmetric, a.semisymmetric);
        check("ricci_flat", self.ricci_flat, a.ricci_flat);
        check("generic", self.generic, a.generic);
        check("null_kernel", self.null_kernel, report.holonomy.null_candidate_everywhere);
        if let Some(k0) = self.k_symmetric_from {
            for kh in &a.k_symmetric {
                check(&format!("k_symmetric[{}]", kh.k), Some(kh.k >= k0), kh.holds);
            }
        }
        out
    }
}

/// Plane wave with `H = ½ A_ij(u) x^i x^j` and flat transverse space, plus
/// its expected classification.
pub fn plane_wave(name: &str, profile: &PlaneWaveProfile) -> Result<(MetricSpec, Expected)> {
    profile.validate()?;
    let m = profile.dim();
    let transverse_coords: Vec<String> = match m {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=m).map(|i| format!("x{i}")).collect(),
    };
    let mut spec = brinkmann_build(&BrinkmannParams {
        name: name.into(),
        transverse_coords,
        h: "0".into(),
        ..Default::default()
    })?;
    // g_uu = −A_ij x^i x^j
    let mut guu: Option<Expr> = None;
    for i in 0..m {
        for j in i..m {
            let weight = if i == j { -1.0 } else { -2.0 };
            let mut poly: Option<Expr> = None;
            for (k, &c) in profile.coefficients[i][j].iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let c = weight * c;
                let term = match k {
                    0 => Expr::Num(c),
                    1 => mul(Expr::Num(c), Expr::Coord(0)),
                    _ => mul(Expr::Num(c), Expr::pow(Expr::Coord(0), k as i32)),
                };
                poly = Some(add(poly, term));
            }
            let Some(poly) = poly else { continue };
            let xx = if i == j {
                Expr::pow(Expr::Coord(i + 2), 2)
            } else {
                mul(Expr::Coord(i + 2), Expr::Coord(j + 2))
            };
            guu = Some(add(guu, mul(poly, xx)));
        }
    }
    if let Some(g) = guu {
        spec.components.insert((0, 0), g);
    }
    let degree = profile.degree();
    let flat = profile.is_zero();
    let expected = Expected {
        constant_curvature: Some(flat),
        symmetric: Some(degree == 0),
        two_symmetric: Some(degree <= 1),
        semisymmetric: Some(true),
        ricci_flat: Some(profile.traceless()),
        generic: Some(false),
        k_symmetric_from: Some(if flat { 1 } else { degree + 1 }),
        null_kernel: Some(true),
    };
    Ok((spec, expected))
}

fn fresh(name: &str, k: usize, taken: &HashSet<String>) -> String {
    if !taken.contains(name) {
        return name.to_string();
    }
    let mut candidate = format!("{name}_b{k}");
    while taken.contains(&candidate) {
        candidate.push('_');
    }
    candidate
}

/// Block-diagonal metric of the blocks in order. Coordinates or parameters
/// whose names are already taken get the suffix `_b<k>` (`k` = block index).
pub fn direct_product(name: &str, blocks: &[MetricSpec]) -> Result<MetricSpec> {
    if blocks.is_empty() {
        return Err(Error::InvalidSpec("direct product of no blocks".into()));
    }
    if blocks.len() == 1 {
        let mut out = blocks[0].clone();
        out.name = name.to_string();
        return Ok(out);
    }
    let mut taken = HashSet::new();
    let mut coords = Vec::new();
    let mut params = Vec::new();
    let mut components = BTreeMap::new();
    let mut domain = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        let c0 = coords.len();
        let p0 = params.len();
        for c in &b.coords {
            let c = fresh(c, k, &taken);
            taken.insert(c.clone());
            coords.push(c);
        }
        for (p, v) in &b.params {
            let p = fresh(p, k, &taken);
            taken.insert(p.clone());
            params.push((p, *v));
        }
        for (&(i, j), e) in &b.components {
            components.insert((i + c0, j + c0), e.remap(&|c| c + c0, &|p| p + p0));
        }
        domain.extend_from_slice(&b.domain);
    }
    let spec = MetricSpec { name: name.to_string(), coords, params, components, domain };
    spec.validate()?;
    Ok(spec)
}

/// Product of a flat block `Σ signs[k] (dt_k)²` with `spec`, flat block first.
/// A negative sign gives a coordinate named `t`, positive ones `s1, s2, ..`.
pub fn flat_extension(spec: &MetricSpec, signs: &[f64]) -> Result<MetricSpec> {
    if signs.is_empty() {
        return Ok(spec.clone());
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::InvalidSpec("flat extension signs must be ±1".into()));
    }
    let added = signs.iter().filter(|&&s| s < 0.0).count();
    let germ = evaluate_metric(spec, &spec.domain_center(), 2)?;
    let existing = negative_eigenvalue_count(&germ.values());
    if existing + added > 1 {
        return Err(Error::Signature(format!(
            "extension would have {} timelike directions",
            existing + added
        )));
    }
    let mut pos = 0;
    let coords: Vec<String> = signs
        .iter()
        .map(|&s| {
            if s < 0.0 {
                "t".to_string()
            } else {
                pos += 1;
                format!("s{pos}")
            }
        })
        .collect();
    let flat = MetricSpec {
        name: "flat".into(),
        components: signs.iter().enumerate().map(|(i, &s)| ((i, i), Expr::Num(s))).collect(),
        domain: vec![DEFAULT_DOMAIN; coords.len()],
        coords,
        params: Vec::new(),
    };
    direct_product(&format!("{}-flat-extension", spec.name), &[flat, spec.clone()])
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub spec: MetricSpec,
    pub expected: Expected,
    /// Jet order needed to resolve every recorded expectation.
    pub min_order: usize,
}

fn parse_spec(
    name: &str,
    coords: &[&str],
    params: &[(&str, f64)],
    domain: &[(&str, f64, f64)],
    entries: &[((usize, usize), &str)],
) -> MetricSpec {
    let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    let params: Vec<(String, f64)> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let names: Vec<String> = params.iter().map(|(k, _)| k.clone()).collect();
    let scope = Scope { coords: &coords, params: &names };
    let components = entries
        .iter()
        .map(|&(ij, src)| (ij, parse_expression(src, &scope, Origin::default()).expect("builtin expression")))
        .collect();
    let domain = coords
        .iter()
        .map(|c| domain.iter().find(|(d, _, _)| d == c).map(|&(_, lo, hi)| (lo, hi)).unwrap_or(DEFAULT_DOMAIN))
        .collect();
    MetricSpec { name: name.into(), coords, params, components, domain }
}

fn minkowski(n: usize) -> MetricSpec {
    let names = ["t", "x", "y", "z", "w"];
    let mut entries = vec![((0, 0), "-1")];
    entries.extend((1..n).map(|i| ((i, i), "1")));
    parse_spec(&format!("minkowski-{n}"), &names[..n], &[], &[], &entries)
}

fn sphere(name: &str, radius: f64) -> MetricSpec {
    parse_spec(
        name,
        &["th", "ph"],
        &[("a", radius)],
        &[("th", 0.3, 2.8)],
        &[((0, 0), "a^2"), ((1, 1), "a^2*sin(th)^2")],
    )
}

fn expect_constant_curvature(flat: bool, lorentzian: bool, n: usize) -> Expected {
    Expected {
        constant_curvature: Some(true),
        symmetric: Some(true),
        two_symmetric: Some(true),
        semisymmetric: Some(true),
        ricci_flat: Some(flat),
        generic: Some(!flat),
        k_symmetric_from: Some(1),
        // the flat kernel is everything; with curvature the kernel is zero
        null_kernel: Some(flat && lorentzian && n >= 2),
    }
}

fn entry(spec: MetricSpec, description: &str, expected: Expected, min_order: usize) -> CatalogEntry {
    CatalogEntry { name: spec.name.clone(), description: description.into(), spec, expected, min_order }
}

/// The shipped reference metrics.
pub fn builtin_metrics() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push(entry(minkowski(n), "flat Minkowski space", expect_constant_curvature(true, true, n), 4));
    }
    out.push(entry(sphere("sphere-unit", 1.0), "unit 2-sphere", expect_constant_curvature(false, false, 2), 4));
    out.push(entry(sphere("sphere-radius-2", 2.0), "2-sphere of radius 2", expect_constant_curvature(false, false, 2), 4));
    out.push(entry(
        parse_spec("hyperbolic-plane", &["x", "y"], &[], &[("y", 0.5, 2.0)], &[((0, 0), "1/y^2"), ((1, 1), "1/y^2")]),
        "upper half-plane, curvature −1",
        expect_constant_curvature(false, false, 2),
        4,
    ));
    out.push(entry(
        parse_spec(
            "de-sitter",
            &["t", "x", "y", "z"],
            &[],
            &[],
            &[((0, 0), "-1"), ((1, 1), "exp(2*t)"), ((2, 2), "exp(2*t)"), ((3, 3), "exp(2*t)")],
        ),
        "de Sitter space in flat slicing, curvature +1",
        expect_constant_curvature(false, true, 4),
        4,
    ));
    out.push(entry(
        parse_spec(
            "schwarzschild",
            &["t", "r", "th", "ph"],
            &[("m", 1.0)],
            &[("r", 3.0, 10.0), ("th", 0.5, 2.6)],
            &[((0, 0), "-(1 - 2*m/r)"), ((1, 1), "1/(1 - 2*m/r)"), ((2, 2), "r^2"), ((3, 3), "r^2*sin(th)^2")],
        ),
        "Schwarzschild exterior, m = 1",
        Expected {
            constant_curvature: Some(false),
            symmetric: Some(false),
            two_symmetric: Some(false),
            semisymmetric: Some(false),
            ricci_flat: Some(true),
            generic: Some(true),
            k_symmetric_from: None,
            null_kernel: Some(false),
        },
        4,
    ));

    let waves: [(&str, &str, &[&[f64]]); 4] = [
        ("plane-wave-constant", "plane wave, A = diag(1, −1)", &[&[1.0], &[-1.0]]),
        ("plane-wave-linear", "plane wave, A = diag(u, −u)", &[&[0.0, 1.0], &[0.0, -1.0]]),
        ("plane-wave-quadratic", "plane wave, A = diag(u², −u²)", &[&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]]),
        ("plane-wave-linear-nonvacuum", "plane wave, A = diag(u, 2u)", &[&[0.0, 1.0], &[0.0, 2.0]]),
    ];
    for (name, description, diag) in waves {
        let profile = PlaneWaveProfile::diagonal(diag);
        let (spec, expected) = plane_wave(name, &profile).expect("builtin profile");
        out.push(entry(spec, description, expected, (profile.degree() + 3).max(4)));
    }
    let flat_brinkmann = brinkmann_build(&BrinkmannParams {
        name: "brinkmann-flat".into(),
        transverse_coords: vec!["x".into(), "y".into()],
        h: "0".into(),
        ..Default::default()
    })
    .expect("builtin Brinkmann");
    out.push(entry(flat_brinkmann, "Minkowski space in double-null form", expect_constant_curvature(true, true, 4), 4));

    let product = direct_product("minkowski2-x-sphere", &[minkowski(2), sphere("sphere-unit", 1.0)]).expect("product");
    out.push(entry(
        product,
        "product of 2D Minkowski and the unit sphere",
        Expected {
            constant_curvature: Some(false),
            symmetric: Some(true),
            two_symmetric: Some(true),
            semisymmetric: Some(true),
            ricci_flat: Some(false),
            generic: Some(false),
            k_symmetric_from: Some(1),
            null_kernel: Some(true),
        },
        4,
    ));
    let (linear, _) = plane_wave("plane-wave-linear", &PlaneWaveProfile::diagonal(&[&[0.0, 1.0], &[0.0, -1.0]]))
        .expect("builtin profile");
    let product = direct_product("plane-wave-linear-x-sphere", &[linear, sphere("sphere-unit", 1.0)]).expect("product");
    out.push(entry(
        product,
        "product of the linear-profile plane wave and the unit sphere",
        Expected {
            constant_curvature: Some(false),
            symmetric: Some(false),
            two_symmetric: Some(true),
            semisymmetric: Some(true),
            ricci_flat: Some(false),
            generic: Some(false),
            k_symmetric_from: Some(2),
            null_kernel: Some(true),
        },
        4,
    ));
    let extension = flat_extension(&sphere("sphere-unit", 1.0), &[-1.0]).expect("extension");
    out.push(entry(
        extension,
        "unit sphere extended by a flat time direction",
        Expected {
            constant_curvature: Some(false),
            symmetric: Some(true),
            two_symmetric: Some(true),
            semisymmetric: Some(true),
            ricci_flat: Some(false),
            generic: Some(false),
            k_symmetric_from: Some(1),
            null_kernel: Some(false),
        },
        4,
    ));
    let curved = brinkmann_build(&BrinkmannParams {
        name: "brinkmann-curved-transverse".into(),
        transverse_coords: vec!["th".into(), "ph".into()],
        h: "u*cos(th)".into(),
        transverse: BTreeMap::from([((0, 0), "1".into()), ((1, 1), "sin(th)^2".into())]),
        domain: vec![DEFAULT_DOMAIN, DEFAULT_DOMAIN, (0.5, 2.6), DEFAULT_DOMAIN],
        ..Default::default()
    })
    .expect("builtin Brinkmann");
    out.push(entry(
        curved,
        "Brinkmann metric over a round sphere; classification unverified",
        Expected::default(),
        4,
    ));
    out
}

pub fn names() -> Vec<String> {
    builtin_metrics().into_iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    builtin_metrics()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}
