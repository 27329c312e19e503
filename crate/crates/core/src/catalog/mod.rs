//! Named operators with reference points and known answers.

use crate::error::{MonoError, Result};
use crate::exact::{self, int, QVec, Rat};
use crate::normgeom::GraphPoint;
use crate::opmodel::{op_sum, Composite, ConvexSet, GraphBox, Operator};
use crate::polyhedron::Polyhedron;
use crate::verdict::Status;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Params = BTreeMap<String, String>;

/// Where a known answer comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the source literature.
    Literature,
    /// Worked out by hand from standard facts.
    Derived,
    /// Immediate from the definition.
    Immediate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub analysis: String,
    pub status: Status,
    pub provenance: Provenance,
    pub note: String,
}

/// A graph point with the box radius to analyse it in and the expected
/// local maximality outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub point: GraphPoint,
    pub radius: f64,
    pub local_max: Expectation,
}

impl ReferencePoint {
    pub fn graph_box(&self) -> GraphBox {
        GraphBox::around(&self.point, self.radius).expect("reference radii are positive")
    }
}

/// Known values of the sampled moduli, where they are constant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedModuli {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong: Option<f64>,
}

/// Whether the sum rule's qualification condition holds for `T1 + T2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualificationReport {
    pub int_dom_first_empty: bool,
    pub int_dom_second_empty: bool,
    /// `dom T1 ∩ int(dom T2) ≠ ∅`.
    pub first_meets_int_second: bool,
    /// `dom T2 ∩ int(dom T1) ≠ ∅`.
    pub second_meets_int_first: bool,
}

impl QualificationReport {
    pub fn holds(&self) -> bool {
        self.first_meets_int_second || self.second_meets_int_first
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub dim: usize,
    pub params: Params,
    pub polyhedral: bool,
    pub monotone: bool,
    pub points: Vec<ReferencePoint>,
    pub moduli: ExpectedModuli,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualification: Option<QualificationReport>,
}

pub const NAMES: [&str; 13] = [
    "identity",
    "linear",
    "neg_identity",
    "abs_subdifferential",
    "normal_cone_halfline",
    "normal_cone_box",
    "normal_cone_polyhedron",
    "normal_cone_parabola",
    "normal_cone_line",
    "example35_sum",
    "singleton_graph",
    "truncated_identity",
    "relu_graph",
];

fn defaults(name: &str) -> Result<Vec<(&'static str, &'static str)>> {
    Ok(match name {
        "identity" | "neg_identity" => vec![("dim", "1")],
        "linear" => vec![("matrix", "2 0 ; 0 5")],
        "normal_cone_box" => vec![("lo", "-1 -1"), ("hi", "1 1")],
        "normal_cone_polyhedron" => vec![("a", "-1 0 ; 0 -1 ; 1 1"), ("b", "0 0 1")],
        "truncated_identity" => vec![("gap", "0 0.5")],
        n if NAMES.contains(&n) => vec![],
        n => return Err(MonoError::UnknownName(n.to_string())),
    })
}

/// Declared parameters merged over the defaults; unknown keys are rejected.
pub fn resolve_params(name: &str, params: &Params) -> Result<Params> {
    let defs = defaults(name)?;
    let mut out: Params = defs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    for (k, v) in params {
        if !out.contains_key(k) {
            return Err(MonoError::BadParams(format!("{name} has no parameter `{k}`")));
        }
        out.insert(k.clone(), v.clone());
    }
    Ok(out)
}

fn parse_vector(key: &str, s: &str) -> Result<QVec> {
    s.split_whitespace()
        .map(|t| exact::parse_rat(t).ok_or_else(|| MonoError::BadParams(format!("{key}: `{t}` is not a number"))))
        .collect()
}

fn parse_matrix(key: &str, s: &str) -> Result<Vec<QVec>> {
    let rows: Vec<QVec> = s.split(';').map(|r| parse_vector(key, r)).collect::<Result<_>>()?;
    let w = rows.first().map_or(0, |r| r.len());
    if w == 0 || rows.iter().any(|r| r.len() != w) {
        return Err(MonoError::BadParams(format!("{key}: rows must be nonempty and of equal length")));
    }
    Ok(rows)
}

fn parse_dim(s: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(d) if (1..=3).contains(&d) => Ok(d),
        _ => Err(MonoError::BadParams(format!("dim: expected 1, 2 or 3, got `{s}`"))),
    }
}

/// Graph `{(x, M x)}`.
pub fn linear_graph(m: &[QVec]) -> Result<Operator> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(MonoError::BadParams("matrix must be square".into()));
    }
    let mut p = Polyhedron::universe(2 * n);
    for (i, row) in m.iter().enumerate() {
        let mut a = row.clone();
        a.extend(exact::scale(&-Rat::one(), &exact::unit(n, i)));
        p = p.with_eq(a, Rat::zero());
    }
    Operator::polyhedral(n, vec![p])
}

fn scaled_identity(n: usize, c: i64) -> Vec<QVec> {
    (0..n).map(|i| exact::scale(&int(c), &exact::unit(n, i))).collect()
}

fn q2(a: i64, b: i64) -> QVec {
    vec![int(a), int(b)]
}

/// Piece `{(x, v) : lo <= x <= hi, v = slope x + c}` in R^2 (1-D operator);
/// `None` bounds are open.
fn segment(lo: Option<Rat>, hi: Option<Rat>, slope: Rat, c: Rat) -> Polyhedron {
    let mut p = Polyhedron::universe(2).with_eq(vec![slope, -Rat::one()], -c);
    if let Some(l) = lo {
        p = p.with_ineq(q2(-1, 0), -l);
    }
    if let Some(h) = hi {
        p = p.with_ineq(q2(1, 0), h);
    }
    p
}

pub fn builtin(name: &str, params: &Params) -> Result<Operator> {
    let p = resolve_params(name, params)?;
    let get = |k: &str| p[k].as_str();
    match name {
        "identity" => linear_graph(&scaled_identity(parse_dim(get("dim"))?, 1)),
        "neg_identity" => linear_graph(&scaled_identity(parse_dim(get("dim"))?, -1)),
        "linear" => linear_graph(&parse_matrix("matrix", get("matrix"))?),
        "abs_subdifferential" => Operator::polyhedral(
            1,
            vec![
                segment(None, Some(int(0)), int(0), int(-1)),
                Polyhedron::universe(2)
                    .with_eq(q2(1, 0), int(0))
                    .with_ineq(q2(0, 1), int(1))
                    .with_ineq(q2(0, -1), int(1)),
                segment(Some(int(0)), None, int(0), int(1)),
            ],
        ),
        "normal_cone_halfline" => Operator::normal_cone(ConvexSet::Halfspace { a: vec![int(-1)], b: int(0) }),
        "normal_cone_box" => {
            let lo = parse_vector("lo", get("lo"))?;
            let hi = parse_vector("hi", get("hi"))?;
            if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(l, h)| l > h) {
                return Err(MonoError::BadParams("box needs lo <= hi of equal length".into()));
            }
            Operator::normal_cone(ConvexSet::Box { lo, hi })
        }
        "normal_cone_polyhedron" => {
            let a = parse_matrix("a", get("a"))?;
            let b = parse_vector("b", get("b"))?;
            if a.len() != b.len() {
                return Err(MonoError::BadParams("a and b must have the same number of rows".into()));
            }
            let n = a[0].len();
            let poly = a.into_iter().zip(b).fold(Polyhedron::universe(n), |p, (r, c)| p.with_ineq(r, c));
            if poly.is_empty() {
                return Err(MonoError::BadParams("polyhedron is empty".into()));
            }
            Operator::normal_cone(ConvexSet::Polyhedron(poly))
        }
        "normal_cone_parabola" => Operator::normal_cone(ConvexSet::Parabola),
        "normal_cone_line" => Operator::normal_cone(ConvexSet::Polyhedron(Polyhedron::universe(2).with_eq(q2(0, 1), int(0)))),
        "example35_sum" => op_sum(&builtin("normal_cone_parabola", &Params::new())?, &builtin("normal_cone_line", &Params::new())?),
        "singleton_graph" => Operator::polyhedral(1, vec![Polyhedron::point(&[int(0), int(0)])]),
        "truncated_identity" => {
            let g = parse_vector("gap", get("gap"))?;
            if g.len() != 2 || g[0] >= g[1] {
                return Err(MonoError::BadParams("gap needs two increasing numbers".into()));
            }
            Operator::polyhedral(
                1,
                vec![
                    segment(None, Some(g[0].clone()), int(1), int(0)),
                    segment(Some(g[1].clone()), None, int(1), int(0)),
                ],
            )
        }
        "relu_graph" => Operator::polyhedral(
            1,
            vec![
                segment(None, Some(int(0)), int(0), int(0)),
                segment(Some(int(0)), None, int(1), int(0)),
            ],
        ),
        n => Err(MonoError::UnknownName(n.to_string())),
    }
}

fn gp(x: &[f64], v: &[f64]) -> GraphPoint {
    GraphPoint::new(x.to_vec(), v.to_vec()).expect("catalog points are consistent")
}

fn refpt(x: &[f64], v: &[f64], radius: f64, status: Status, provenance: Provenance, note: &str) -> ReferencePoint {
    ReferencePoint {
        point: gp(x, v),
        radius,
        local_max: Expectation {
            analysis: "local_max".into(),
            status,
            provenance,
            note: note.into(),
        },
    }
}

/// Expected outcomes for a catalog entry at its default parameters.
pub fn expected(name: &str) -> Result<CatalogEntry> {
    use Provenance::*;
    use Status::*;
    let params = resolve_params(name, &Params::new())?;
    let op = builtin(name, &params)?;
    let dim = op.dim();
    let mut moduli = ExpectedModuli::default();
    let mut qualification = None;
    let mut monotone = true;
    let (description, points): (&str, Vec<ReferencePoint>) = match name {
        "identity" => {
            moduli = ExpectedModuli { hypo: Some(0.0), strong: Some(1.0) };
            (
                "T(x) = x",
                vec![
                    refpt(&[0.0], &[0.0], 1.0, Pass, Immediate, "maximal monotone everywhere"),
                    refpt(&[0.5], &[0.5], 1.0, Pass, Immediate, "maximal monotone everywhere"),
                    refpt(&[-1.0], &[-1.0], 1.0, Pass, Immediate, "maximal monotone everywhere"),
                ],
            )
        }
        "linear" => {
            moduli = ExpectedModuli { hypo: Some(0.0), strong: Some(2.0) };
            (
                "T(x) = M x, default M = diag(2, 5)",
                vec![
                    refpt(&[0.0, 0.0], &[0.0, 0.0], 1.0, Pass, Derived, "positive definite linear map"),
                    refpt(&[0.5, 0.5], &[1.0, 2.5], 1.0, Pass, Derived, "positive definite linear map"),
                    refpt(&[-0.5, 0.0], &[-1.0, 0.0], 1.0, Pass, Derived, "positive definite linear map"),
                ],
            )
        }
        "neg_identity" => {
            monotone = false;
            moduli = ExpectedModuli { hypo: Some(1.0), strong: Some(-1.0) };
            (
                "T(x) = -x",
                vec![
                    refpt(&[0.0], &[0.0], 1.0, Fail, Immediate, "not monotone on any neighborhood"),
                    refpt(&[0.5], &[-0.5], 1.0, Fail, Immediate, "not monotone on any neighborhood"),
                    refpt(&[-1.0], &[1.0], 1.0, Fail, Immediate, "not monotone on any neighborhood"),
                ],
            )
        }
        "abs_subdifferential" => (
            "subdifferential of |x|",
            vec![
                refpt(&[0.0], &[0.0], 1.0, Pass, Immediate, "subdifferential of a convex function"),
                refpt(&[0.0], &[1.0], 1.0, Pass, Immediate, "subdifferential of a convex function"),
                refpt(&[1.0], &[1.0], 1.0, Pass, Immediate, "subdifferential of a convex function"),
                refpt(&[-0.5], &[-1.0], 1.0, Pass, Immediate, "subdifferential of a convex function"),
            ],
        ),
        "normal_cone_halfline" => (
            "normal cone to [0, inf)",
            vec![
                refpt(&[0.0], &[0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[0.0], &[-0.5], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[1.0], &[0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
            ],
        ),
        "normal_cone_box" => (
            "normal cone to a box, default [-1, 1]^2",
            vec![
                refpt(&[1.0, 1.0], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[1.0, 0.0], &[0.5, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[0.0, 0.0], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[1.0, 1.0], &[0.5, 0.5], 1.0, Pass, Derived, "normal cone of a closed convex set"),
            ],
        ),
        "normal_cone_polyhedron" => (
            "normal cone to {A x <= b}, default triangle x >= 0, y >= 0, x + y <= 1",
            vec![
                refpt(&[0.0, 0.0], &[-0.5, -0.5], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[0.5, 0.5], &[0.25, 0.25], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[0.25, 0.25], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
            ],
        ),
        "normal_cone_parabola" => (
            "normal cone to {(a, b) : b >= a^2}",
            vec![
                refpt(&[0.0, 0.0], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[0.0, 1.0], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[1.0, 1.0], &[2.0, -1.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
            ],
        ),
        "normal_cone_line" => (
            "normal cone to the line R x {0}",
            vec![
                refpt(&[0.0, 0.0], &[0.0, 0.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[1.0, 0.0], &[0.0, 1.0], 1.0, Pass, Derived, "normal cone of a closed convex set"),
                refpt(&[-0.5, 0.0], &[0.0, -0.5], 1.0, Pass, Derived, "normal cone of a closed convex set"),
            ],
        ),
        "example35_sum" => {
            if let Operator::Composite(c) = &op {
                if let Composite::Sum(a, b) = c.kind() {
                    qualification = Some(qualification_report(a, b)?);
                }
            }
            (
                "sum of the normal cones to the parabola epigraph and to the line R x {0}",
                vec![
                    refpt(&[0.0, 0.0], &[0.0, 0.0], 1.0, Fail, Literature, "the sum is not maximal monotone"),
                    refpt(&[0.0, 0.0], &[0.0, 0.5], 1.0, Fail, Derived, "extension by ((a, 0), (0, 0.5)) stays monotone"),
                ],
            )
        }
        "singleton_graph" => (
            "graph {(0, 0)}",
            vec![refpt(&[0.0], &[0.0], 1.0, Fail, Immediate, "extendable by any monotone point")],
        ),
        "truncated_identity" => (
            "identity with the open interval gap removed, default gap (0, 0.5)",
            vec![
                refpt(&[0.0], &[0.0], 1.0, Fail, Derived, "gap edge: the graph can be extended into the gap"),
                refpt(&[0.5], &[0.5], 1.0, Fail, Derived, "gap edge: the graph can be extended into the gap"),
                refpt(&[-0.5], &[-0.5], 0.25, Pass, Derived, "identity away from the gap"),
                refpt(&[1.0], &[1.0], 0.25, Pass, Derived, "identity away from the gap"),
            ],
        ),
        "relu_graph" => (
            "T(x) = max(x, 0)",
            vec![
                refpt(&[0.0], &[0.0], 1.0, Pass, Immediate, "continuous nondecreasing function"),
                refpt(&[1.0], &[1.0], 1.0, Pass, Immediate, "continuous nondecreasing function"),
                refpt(&[-1.0], &[0.0], 1.0, Pass, Immediate, "continuous nondecreasing function"),
            ],
        ),
        n => return Err(MonoError::UnknownName(n.to_string())),
    };
    let polyhedral = op.local_graph().is_some() && name != "example35_sum";
    Ok(CatalogEntry {
        name: name.to_string(),
        description: description.to_string(),
        dim,
        params,
        polyhedral,
        monotone,
        points,
        moduli,
        qualification,
    })
}

/// Effective domain, as polyhedral pieces or the parabola epigraph.
enum Domain {
    Pieces(Vec<Polyhedron>),
    Epigraph,
}

fn domain_of(op: &Operator) -> Result<Domain> {
    if let Operator::NormalCone(nc) = op {
        if *nc.set() == ConvexSet::Parabola {
            return Ok(Domain::Epigraph);
        }
    }
    match op.local_graph() {
        Some((g, regions)) if regions.is_empty() => Ok(Domain::Pieces(g.domain_pieces())),
        _ => Err(MonoError::Unsupported(format!("domain of {}", op.describe()))),
    }
}

fn interior_empty(d: &Domain, n: usize) -> bool {
    match d {
        Domain::Epigraph => false,
        Domain::Pieces(ps) => ps.iter().all(|p| p.vrep().is_none_or(|v| v.affine_dim() < n)),
    }
}

fn strictly_inside(p: &Polyhedron, z: &[Rat]) -> bool {
    p.eqs().is_empty() && p.ineqs().iter().all(|c| exact::dot(&c.a, z) < c.b)
}

/// Whether a polyhedron in R^2 has a point with `b > a^2`. The concave
/// function `b - a^2` has no stationary point, so its supremum over the
/// polyhedron is approached along a vertical recession direction or attained
/// at a vertex or at a stationary point along an edge.
fn reaches_above_parabola(p: &Polyhedron) -> bool {
    let above = |z: &QVec| z[1] > &z[0] * &z[0];
    for f in p.faces() {
        let Some(v) = f.poly.vrep() else { continue };
        if v.rays.iter().any(|d| d[0].is_zero() && d[1] > Rat::zero())
            || v.lineality.iter().any(|d| d[0].is_zero() && !d[1].is_zero())
        {
            return true;
        }
        if above(&f.relint) || v.points.iter().any(|z| above(z)) {
            return true;
        }
        let dirs: Vec<&QVec> = v.rays.iter().chain(&v.lineality).collect();
        if v.affine_dim() == 1 && dirs.len() == 1 || v.affine_dim() == 1 && v.points.len() == 2 {
            let d = match dirs.first() {
                Some(d) => (*d).clone(),
                None => exact::sub(&v.points[1], &v.points[0]),
            };
            if !d[0].is_zero() {
                let base = &f.relint;
                let t = (&d[1] - int(2) * &base[0] * &d[0]) / (int(2) * &d[0] * &d[0]);
                let cand = exact::add(base, &exact::scale(&t, &d));
                if f.poly.contains(&cand) && above(&cand) {
                    return true;
                }
            }
        }
    }
    false
}

fn full_dimensional(p: &Polyhedron, n: usize) -> bool {
    p.vrep().is_some_and(|v| v.affine_dim() == n)
}

/// `dom A ∩ int(dom B) ≠ ∅`, with the interior of a union of pieces taken
/// as the union of the interiors of its full-dimensional pieces.
fn meets_interior(a: &Domain, b: &Domain, n: usize) -> bool {
    match (a, b) {
        (Domain::Pieces(pa), Domain::Pieces(pb)) => pa.iter().any(|x| {
            pb.iter()
                .filter(|y| full_dimensional(y, n))
                .any(|y| x.intersect(y).relint_point().is_some_and(|r| strictly_inside(y, &r)))
        }),
        (Domain::Pieces(pa), Domain::Epigraph) => pa.iter().any(reaches_above_parabola),
        // The open interior of a full-dimensional piece meets the epigraph
        // exactly when the piece reaches strictly above the parabola.
        (Domain::Epigraph, Domain::Pieces(pb)) => pb
            .iter()
            .any(|y| full_dimensional(y, n) && reaches_above_parabola(y)),
        (Domain::Epigraph, Domain::Epigraph) => true,
    }
}

/// Qualification report for the sum `t1 + t2`.
pub fn qualification_report(t1: &Operator, t2: &Operator) -> Result<QualificationReport> {
    let n = t1.dim();
    let (d1, d2) = (domain_of(t1)?, domain_of(t2)?);
    Ok(QualificationReport {
        int_dom_first_empty: interior_empty(&d1, n),
        int_dom_second_empty: interior_empty(&d2, n),
        first_meets_int_second: !interior_empty(&d2, n) && meets_interior(&d1, &d2, n),
        second_meets_int_first: !interior_empty(&d1, n) && meets_interior(&d2, &d1, n),
    })
}

/// Sum entries and their summands, for the qualification report.
pub fn summands(name: &str) -> Option<(&'static str, &'static str)> {
    (name == "example35_sum").then_some(("normal_cone_parabola", "normal_cone_line"))
}

#[cfg(test)]
mod tests;
