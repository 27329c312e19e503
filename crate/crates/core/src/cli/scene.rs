//! Scene files: a line-oriented description of a norm, named operators and
//! analysis requests.
//!
//! ```text
//! # comment
//! [norm]
//! p = 2
//! weights = 1 1
//!
//! [operator P]
//! catalog = normal_cone_parabola
//!
//! [operator L]
//! catalog = normal_cone_line
//!
//! [operator T]
//! sum = P L
//!
//! [analysis]
//! run = typeA_witness_search
//! op = T
//! x = 0 0
//! v = 0 0
//! radius = 1
//! ```

use crate::catalog::{self, Params};
use crate::error::MonoError;
use crate::exact::{self, QVec};
use crate::normgeom::{GraphPoint, NormSpec};
use crate::opmodel::{op_inverse, op_localize, op_scale, op_shift_j, op_sum, ConvexSet, GraphBox, Operator, SmoothMap};
use crate::polyhedron::Polyhedron;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub code: &'static str,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}: {}", self.line, self.column, self.code, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Header {
    Norm,
    Operator(String),
    Analysis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// Column where the value starts.
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub header: Header,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }
}

pub const ANALYSES: [&str; 14] = [
    "monotone_witness",
    "strong_modulus",
    "hypo_modulus",
    "isc_probe",
    "typeA_witness_search",
    "resolvent_solve",
    "minty_local_probe",
    "strong_inverse_probe",
    "localization_lipschitz",
    "regular_coderivative",
    "limiting_coderivative",
    "psd_criterion",
    "local_max_via_coderivative",
    "supremal_psd_sigma",
];

/// One analysis request with its parameters resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub run: String,
    pub op: String,
    pub point: GraphPoint,
    pub x_radius: f64,
    pub v_radius: f64,
    pub density: usize,
    pub sigma: Option<f64>,
    pub lambdas: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub modulus: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub shear: Option<f64>,
}

impl Request {
    pub fn graph_box(&self, norm: &NormSpec) -> GraphBox {
        GraphBox::new(self.point.x.clone(), self.x_radius, self.point.v.clone(), self.v_radius)
            .and_then(|b| b.with_norm(norm.clone()))
            .expect("validated while parsing")
    }
}

/// A parsed scene. Operators are built while parsing, so a scene that
/// parses can be run.
#[derive(Clone, Debug)]
pub struct Scene {
    pub sections: Vec<Section>,
    pub norm_p: f64,
    pub norm_weights: Option<Vec<f64>>,
    pub operators: Vec<(String, Operator)>,
    pub requests: Vec<Request>,
}

impl Scene {
    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    /// Norm for an `n`-dimensional operator.
    pub fn norm(&self, n: usize) -> NormSpec {
        match &self.norm_weights {
            Some(w) => NormSpec::new(self.norm_p, w.clone()).expect("validated while parsing"),
            None => NormSpec::new(self.norm_p, vec![1.0; n]).expect("validated while parsing"),
        }
    }

    /// Canonical text: comments dropped, whitespace normalized, one blank
    /// line between sections. Parsing it yields the same scene.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            match &s.header {
                Header::Norm => out.push_str("[norm]\n"),
                Header::Operator(n) => out.push_str(&format!("[operator {n}]\n")),
                Header::Analysis => out.push_str("[analysis]\n"),
            }
            for e in &s.entries {
                out.push_str(&format!("{} = {}\n", e.key, e.value));
            }
        }
        out
    }
}

fn err(code: &'static str, line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        code,
        line,
        column,
        message: message.into(),
    }
}

fn at(e: &Entry, code: &'static str, message: impl Into<String>) -> ParseError {
    err(code, e.line, e.column, message)
}

fn mono_err(e: &Entry, m: MonoError) -> ParseError {
    let code = match &m {
        MonoError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
        MonoError::UnknownName(_) => "UNKNOWN_NAME",
        MonoError::BadParams(_) => "BAD_PARAMS",
        _ => "PARSE_ERROR",
    };
    at(e, code, m.to_string())
}

fn normalize_value(v: &str) -> String {
    v.replace(';', " ; ").split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_key(k: &str) -> bool {
    let mut c = k.chars();
    c.next().is_some_and(|h| h.is_ascii_alphabetic() || h == '_')
        && k.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '.')
}

/// Splits the text into sections.
pub fn parse_sections(text: &str) -> PResult<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len() + 1;
        if let Some(inner) = trimmed.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return Err(err("PARSE_ERROR", line, indent, "unterminated section header"));
            };
            let words: Vec<&str> = inner.split_whitespace().collect();
            let header = match words.as_slice() {
                ["norm"] => Header::Norm,
                ["analysis"] => Header::Analysis,
                ["operator", name] if is_key(name) && !name.contains('.') => Header::Operator(name.to_string()),
                ["operator", ..] => return Err(err("PARSE_ERROR", line, indent, "expected `[operator <name>]`")),
                _ => return Err(err("PARSE_ERROR", line, indent, format!("unknown section `[{inner}]`"))),
            };
            sections.push(Section {
                header,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = raw.find('=') else {
            return Err(err("PARSE_ERROR", line, indent, "expected `key = value`"));
        };
        let key = raw[..eq].trim();
        if !is_key(key) {
            return Err(err("PARSE_ERROR", line, indent, format!("invalid key `{key}`")));
        }
        let after = &raw[eq + 1..];
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        let value = normalize_value(after);
        if value.is_empty() {
            return Err(err("PARSE_ERROR", line, value_col, format!("missing value for `{key}`")));
        }
        let Some(sec) = sections.last_mut() else {
            return Err(err("PARSE_ERROR", line, indent, "entry outside of a section"));
        };
        sec.entries.push(Entry {
            key: key.to_string(),
            value,
            line,
            column: value_col,
        });
    }
    Ok(sections)
}

fn floats(e: &Entry) -> PResult<Vec<f64>> {
    e.value
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| at(e, "PARSE_ERROR", format!("`{t}` is not a finite number")))
        })
        .collect()
}

fn float(e: &Entry) -> PResult<f64> {
    match floats(e)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(at(e, "PARSE_ERROR", format!("`{}` expects one number", e.key))),
    }
}

fn rats(e: &Entry, s: &str) -> PResult<QVec> {
    s.split_whitespace()
        .map(|t| exact::parse_rat(t).ok_or_else(|| at(e, "PARSE_ERROR", format!("`{t}` is not a number"))))
        .collect()
}

fn matrix(e: &Entry) -> PResult<Vec<QVec>> {
    let rows: Vec<QVec> = e.value.split(';').map(|r| rats(e, r)).collect::<PResult<_>>()?;
    let w = rows.first().map_or(0, |r| r.len());
    if w == 0 || rows.iter().any(|r| r.len() != w) {
        return Err(at(e, "PARSE_ERROR", "matrix rows must be nonempty and of equal length"));
    }
    Ok(rows)
}

fn f64_matrix(e: &Entry) -> PResult<Vec<Vec<f64>>> {
    Ok(matrix(e)?.iter().map(|r| exact::vec_to_f64(r)).collect())
}

/// `a1 .. ak <= b ; ...` (also `>=` and `=`) over `(x, v)`.
fn piece(e: &Entry, n: usize) -> PResult<Polyhedron> {
    let mut p = Polyhedron::universe(2 * n);
    for row in e.value.split(';') {
        let (lhs, op, rhs) = if let Some((l, r)) = row.split_once("<=") {
            (l, "<=", r)
        } else if let Some((l, r)) = row.split_once(">=") {
            (l, ">=", r)
        } else if let Some((l, r)) = row.split_once('=') {
            (l, "=", r)
        } else {
            return Err(at(e, "PARSE_ERROR", format!("constraint `{}` needs <=, >= or =", row.trim())));
        };
        let a = rats(e, lhs)?;
        let b = rats(e, rhs)?;
        if a.len() != 2 * n || b.len() != 1 {
            return Err(at(e, "DIMENSION_MISMATCH", format!("constraint `{}` needs {} coefficients and one bound", row.trim(), 2 * n)));
        }
        let b = b[0].clone();
        p = match op {
            "<=" => p.with_ineq(a, b),
            ">=" => p.with_ineq(exact::neg(&a), -b),
            _ => p.with_eq(a, b),
        };
    }
    Ok(p)
}

fn dim_entry(sec: &Section) -> PResult<Option<usize>> {
    match sec.get("dim") {
        None => Ok(None),
        Some(e) => match e.value.parse::<usize>() {
            Ok(d) if (1..=3).contains(&d) => Ok(Some(d)),
            _ => Err(at(e, "PARSE_ERROR", "dim must be 1, 2 or 3")),
        },
    }
}

const KINDS: [&str; 11] = [
    "catalog",
    "linear",
    "piece",
    "smooth",
    "normal_cone",
    "point",
    "sum",
    "inverse",
    "shift",
    "scale",
    "localize",
];

fn allowed_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "catalog" => &[],
        "linear" => &[],
        "piece" => &["dim"],
        "smooth" => &["dim", "matrix", "offset", "coef"],
        "normal_cone" => &["a", "b", "lo", "hi"],
        "point" => &["dim"],
        "sum" | "inverse" => &[],
        "shift" => &["sigma"],
        "scale" => &["factor"],
        "localize" => &["x", "v", "radius", "x_radius", "v_radius"],
        _ => &[],
    }
}

fn build_operator(sec: &Section, defined: &[(String, Operator)], p: f64, weights: &Option<Vec<f64>>) -> PResult<Operator> {
    let kinds: Vec<&Entry> = sec.entries.iter().filter(|e| KINDS.contains(&e.key.as_str())).collect();
    let Some(kind) = kinds.first() else {
        return Err(err("PARSE_ERROR", sec.line, 1, format!("operator needs one of: {}", KINDS.join(", "))));
    };
    if let Some(extra) = kinds.iter().find(|e| e.key != kind.key) {
        return Err(at(extra, "PARSE_ERROR", format!("`{}` conflicts with `{}`", extra.key, kind.key)));
    }
    if kind.key != "piece" && kind.key != "point" && kinds.len() > 1 {
        return Err(at(kinds[1], "PARSE_ERROR", format!("`{}` given twice", kind.key)));
    }
    for e in &sec.entries {
        let ok = e.key == kind.key
            || allowed_keys(&kind.key).contains(&e.key.as_str())
            || (kind.key == "catalog" && e.key.starts_with("param."));
        if !ok {
            return Err(at(e, "PARSE_ERROR", format!("`{}` is not valid for a `{}` operator", e.key, kind.key)));
        }
    }
    let lookup = |e: &Entry, name: &str| -> PResult<Operator> {
        defined
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o.clone())
            .ok_or_else(|| at(e, "UNKNOWN_OPERATOR", format!("operator `{name}` is not defined above")))
    };
    let spec_for = |e: &Entry, n: usize| -> PResult<NormSpec> {
        match weights {
            Some(w) if w.len() != n => Err(at(e, "DIMENSION_MISMATCH", format!("norm weights have dimension {}, operator has {n}", w.len()))),
            Some(w) => NormSpec::new(p, w.clone()).map_err(|m| mono_err(e, m)),
            None => NormSpec::new(p, vec![1.0; n]).map_err(|m| mono_err(e, m)),
        }
    };
    let single = |e: &Entry| -> PResult<Operator> {
        match e.value.split_whitespace().collect::<Vec<_>>().as_slice() {
            [name] => lookup(e, name),
            _ => Err(at(e, "PARSE_ERROR", format!("`{}` takes one operator name", e.key))),
        }
    };
    let need = |key: &str| -> PResult<&Entry> {
        sec.get(key)
            .ok_or_else(|| err("PARSE_ERROR", sec.line, 1, format!("`{}` operator needs `{key}`", kind.key)))
    };
    let e = *kind;
    match e.key.as_str() {
        "catalog" => {
            let params: Params = sec
                .entries
                .iter()
                .filter_map(|p| p.key.strip_prefix("param.").map(|k| (k.to_string(), p.value.clone())))
                .collect();
            catalog::builtin(&e.value, &params).map_err(|m| mono_err(e, m))
        }
        "linear" => catalog::linear_graph(&matrix(e)?).map_err(|m| mono_err(e, m)),
        "piece" => {
            let n = dim_entry(sec)?.unwrap_or(1);
            let pieces = sec.all("piece").map(|pe| piece(pe, n)).collect::<PResult<Vec<_>>>()?;
            Operator::polyhedral(n, pieces).map_err(|m| mono_err(e, m))
        }
        "point" => {
            let n = dim_entry(sec)?.unwrap_or(1);
            let mut pts = Vec::new();
            for pe in sec.all("point") {
                let halves: Vec<&str> = pe.value.split(';').collect();
                let parse = |s: &str| -> PResult<Vec<f64>> {
                    s.split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(|_| at(pe, "PARSE_ERROR", format!("`{t}` is not a number"))))
                        .collect()
                };
                if halves.len() != 2 {
                    return Err(at(pe, "PARSE_ERROR", "point needs `x ; v`"));
                }
                let (x, v) = (parse(halves[0])?, parse(halves[1])?);
                if x.len() != n || v.len() != n {
                    return Err(at(pe, "DIMENSION_MISMATCH", format!("point needs {n} + {n} coordinates")));
                }
                pts.push(GraphPoint { x, v });
            }
            Operator::sampled(n, pts).map_err(|m| mono_err(e, m))
        }
        "smooth" => match e.value.as_str() {
            "affine" => {
                let m = f64_matrix(need("matrix")?)?;
                let b = match sec.get("offset") {
                    Some(o) => floats(o)?,
                    None => vec![0.0; m.len()],
                };
                SmoothMap::affine(m, b).map(Operator::Smooth).map_err(|m| mono_err(e, m))
            }
            "cubic" => {
                let n = dim_entry(sec)?.unwrap_or(1);
                let c = match sec.get("coef") {
                    Some(c) => float(c)?,
                    None => 1.0,
                };
                Ok(Operator::Smooth(SmoothMap::cubic(n, c)))
            }
            other => Err(at(e, "PARSE_ERROR", format!("unknown smooth map `{other}` (affine, cubic)"))),
        },
        "normal_cone" => {
            let set = match e.value.as_str() {
                "parabola" => ConvexSet::Parabola,
                "halfspace" => {
                    let a = rats(need("a")?, &need("a")?.value)?;
                    let b = rats(need("b")?, &need("b")?.value)?;
                    if b.len() != 1 {
                        return Err(at(need("b")?, "PARSE_ERROR", "halfspace needs a single bound"));
                    }
                    ConvexSet::Halfspace { a, b: b[0].clone() }
                }
                "box" => {
                    let lo = rats(need("lo")?, &need("lo")?.value)?;
                    let hi = rats(need("hi")?, &need("hi")?.value)?;
                    if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| l > h) {
                        return Err(at(need("hi")?, "DIMENSION_MISMATCH", "box needs lo <= hi of equal length"));
                    }
                    ConvexSet::Box { lo, hi }
                }
                "polyhedron" => {
                    let a = matrix(need("a")?)?;
                    let b = rats(need("b")?, &need("b")?.value)?;
                    if a.len() != b.len() {
                        return Err(at(need("b")?, "DIMENSION_MISMATCH", "a and b need the same number of rows"));
                    }
                    let n = a[0].len();
                    ConvexSet::Polyhedron(a.into_iter().zip(b).fold(Polyhedron::universe(n), |p, (r, c)| p.with_ineq(r, c)))
                }
                other => return Err(at(e, "PARSE_ERROR", format!("unknown set `{other}` (halfspace, box, polyhedron, parabola)"))),
            };
            Operator::normal_cone(set).map_err(|m| mono_err(e, m))
        }
        "sum" => match e.value.split_whitespace().collect::<Vec<_>>().as_slice() {
            [a, b] => op_sum(&lookup(e, a)?, &lookup(e, b)?).map_err(|m| mono_err(e, m)),
            _ => Err(at(e, "PARSE_ERROR", "sum takes two operator names")),
        },
        "inverse" => Ok(op_inverse(&single(e)?)),
        "shift" => {
            let op = single(e)?;
            let sigma = float(need("sigma")?)?;
            let spec = spec_for(e, op.dim())?;
            op_shift_j(&op, sigma, &spec).map_err(|m| mono_err(e, m))
        }
        "scale" => {
            let op = single(e)?;
            op_scale(&op, float(need("factor")?)?).map_err(|m| mono_err(e, m))
        }
        "localize" => {
            let op = single(e)?;
            let n = op.dim();
            let x = floats(need("x")?)?;
            let v = floats(need("v")?)?;
            if x.len() != n || v.len() != n {
                return Err(at(need("x")?, "DIMENSION_MISMATCH", format!("localization center needs {n} + {n} coordinates")));
            }
            let (xr, vr) = radii(sec)?;
            let b = GraphBox::new(x, xr, v, vr).map_err(|m| mono_err(e, m))?;
            op_localize(&op, &b).map_err(|m| mono_err(e, m))
        }
        _ => unreachable!("kind keys are listed in KINDS"),
    }
}

fn radii(sec: &Section) -> PResult<(f64, f64)> {
    let r = match sec.get("radius") {
        Some(e) => Some(float(e)?),
        None => None,
    };
    let xr = match sec.get("x_radius") {
        Some(e) => float(e)?,
        None => r.unwrap_or(1.0),
    };
    let vr = match sec.get("v_radius") {
        Some(e) => float(e)?,
        None => r.unwrap_or(1.0),
    };
    for (k, val) in [("x_radius", xr), ("v_radius", vr)] {
        if !(val > 0.0) {
            let e = sec.get(k).or_else(|| sec.get("radius")).expect("defaults are positive");
            return Err(at(e, "PARSE_ERROR", "radii must be positive"));
        }
    }
    Ok((xr, vr))
}

const REQUEST_KEYS: [&str; 15] = [
    "run", "op", "x", "v", "radius", "x_radius", "v_radius", "density", "sigma", "lambda", "lambdas", "y", "modulus", "radii", "shear",
];

fn build_request(sec: &Section, ops: &[(String, Operator)], norm_dim: Option<usize>) -> PResult<Request> {
    for e in &sec.entries {
        if !REQUEST_KEYS.contains(&e.key.as_str()) {
            return Err(at(e, "PARSE_ERROR", format!("unknown analysis key `{}`", e.key)));
        }
        if sec.all(&e.key).count() > 1 {
            return Err(at(e, "PARSE_ERROR", format!("`{}` given twice", e.key)));
        }
    }
    let need = |key: &str| -> PResult<&Entry> {
        sec.get(key)
            .ok_or_else(|| err("PARSE_ERROR", sec.line, 1, format!("analysis needs `{key}`")))
    };
    let run_e = need("run")?;
    if !ANALYSES.contains(&run_e.value.as_str()) {
        return Err(at(run_e, "PARSE_ERROR", format!("unknown analysis `{}`", run_e.value)));
    }
    let op_e = need("op")?;
    let op = ops
        .iter()
        .find(|(n, _)| *n == op_e.value)
        .map(|(_, o)| o)
        .ok_or_else(|| at(op_e, "UNKNOWN_OPERATOR", format!("operator `{}` is not defined", op_e.value)))?;
    let n = op.dim();
    if let Some(d) = norm_dim {
        if d != n {
            return Err(at(op_e, "DIMENSION_MISMATCH", format!("norm weights have dimension {d}, operator has {n}")));
        }
    }
    let vec_n = |key: &str| -> PResult<Vec<f64>> {
        let e = need(key)?;
        let v = floats(e)?;
        if v.len() != n {
            return Err(at(e, "DIMENSION_MISMATCH", format!("`{key}` needs {n} coordinates, got {}", v.len())));
        }
        Ok(v)
    };
    let x = vec_n("x")?;
    let v = vec_n("v")?;
    let (x_radius, v_radius) = radii(sec)?;
    let density = match sec.get("density") {
        Some(e) => match e.value.parse::<usize>() {
            Ok(d) if (2..=64).contains(&d) => d,
            _ => return Err(at(e, "PARSE_ERROR", "density must be an integer in 2..=64")),
        },
        None => 5,
    };
    let opt = |key: &str| -> PResult<Option<f64>> { sec.get(key).map(float).transpose() };
    let lambdas = match (sec.get("lambda"), sec.get("lambdas")) {
        (Some(a), Some(_)) => return Err(at(a, "PARSE_ERROR", "give either `lambda` or `lambdas`")),
        (Some(e), None) => vec![float(e)?],
        (None, Some(e)) => floats(e)?,
        (None, None) => vec![1.0],
    };
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0)) {
        let e = sec.get("lambda").or_else(|| sec.get("lambdas")).expect("non-default lambdas");
        return Err(at(e, "PARSE_ERROR", format!("lambda must be positive, got {bad}")));
    }
    let y = match sec.get("y") {
        Some(_) => Some(vec_n("y")?),
        None if run_e.value == "resolvent_solve" => return Err(err("PARSE_ERROR", sec.line, 1, "resolvent_solve needs `y`")),
        None => None,
    };
    let radii_list = match sec.get("radii") {
        Some(e) => {
            let r = floats(e)?;
            if r.is_empty() || r.iter().any(|x| !(*x > 0.0)) {
                return Err(at(e, "PARSE_ERROR", "radii must be positive"));
            }
            Some(r)
        }
        None => None,
    };
    Ok(Request {
        run: run_e.value.clone(),
        op: op_e.value.clone(),
        point: GraphPoint { x, v },
        x_radius,
        v_radius,
        density,
        sigma: opt("sigma")?,
        lambdas,
        y,
        modulus: opt("modulus")?,
        radii: radii_list,
        shear: opt("shear")?,
    })
}

/// Parses a scene and builds its operators; the first problem is reported
/// with its position.
pub fn parse_scene(text: &str) -> PResult<Scene> {
    let sections = parse_sections(text)?;
    let mut norm_p = 2.0;
    let mut norm_weights = None;
    let mut seen_norm = false;
    for s in sections.iter().filter(|s| s.header == Header::Norm) {
        if seen_norm {
            return Err(err("PARSE_ERROR", s.line, 1, "only one [norm] section is allowed"));
        }
        seen_norm = true;
        for e in &s.entries {
            match e.key.as_str() {
                "p" => norm_p = float(e)?,
                "weights" => norm_weights = Some(floats(e)?),
                k => return Err(at(e, "PARSE_ERROR", format!("unknown norm key `{k}`"))),
            }
        }
        let n = norm_weights.as_ref().map_or(1, |w: &Vec<f64>| w.len());
        let w = norm_weights.clone().unwrap_or(vec![1.0; n]);
        if let Err(m) = NormSpec::new(norm_p, w) {
            return Err(err("PARSE_ERROR", s.line, 1, m.to_string()));
        }
    }
    let mut operators: Vec<(String, Operator)> = Vec::new();
    let mut requests = Vec::new();
    let norm_dim = norm_weights.as_ref().map(|w| w.len());
    for s in &sections {
        match &s.header {
            Header::Norm => {}
            Header::Operator(name) => {
                if operators.iter().any(|(n, _)| n == name) {
                    return Err(err("PARSE_ERROR", s.line, 1, format!("operator `{name}` defined twice")));
                }
                let op = build_operator(s, &operators, norm_p, &norm_weights)?;
                operators.push((name.clone(), op));
            }
            Header::Analysis => requests.push(build_request(s, &operators, norm_dim)?),
        }
    }
    Ok(Scene {
        sections,
        norm_p,
        norm_weights,
        operators,
        requests,
    })
}

/// Parameters of catalog references, for echoing.
pub fn catalog_refs(scene: &Scene) -> BTreeMap<String, String> {
    scene
        .sections
        .iter()
        .filter_map(|s| match &s.header {
            Header::Operator(n) => s.get("catalog").map(|e| (n.clone(), e.value.clone())),
            _ => None,
        })
        .collect()
}
