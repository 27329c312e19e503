//! Set-valued operators on R^n and their graph algebra.

mod region;
pub(crate) mod sample;
mod values;

pub use region::{grid, GraphBox};
pub use sample::sample_graph;
pub use values::ValueSet;
pub(crate) use region::cmp_f64_vec;

use crate::error::{check_dim, MonoError, Result};
use crate::exact::{self, QVec, Rat};
use crate::normgeom::{duality_map, GraphPoint, NormSpec};
use crate::polyhedron::{Polyhedron, VRep};
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Finite union of closed convex polyhedra in `R^{2n}`, coordinates `(x, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGraph {
    n: usize,
    pieces: Vec<Polyhedron>,
}

impl PolyGraph {
    pub fn new(n: usize, pieces: Vec<Polyhedron>) -> Result<PolyGraph> {
        for p in &pieces {
            check_dim(2 * n, p.dim())?;
        }
        Ok(PolyGraph {
            n,
            pieces: pieces.into_iter().filter(|p| !p.is_empty()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Polyhedron] {
        &self.pieces
    }

    /// `{ v : (x, v) in piece }` for every piece, empty slices dropped.
    pub fn slice(&self, x: &[Rat]) -> Vec<Polyhedron> {
        self.pieces
            .iter()
            .map(|p| slice_piece(p, self.n, x))
            .filter(|s| !s.is_empty())
            .collect()
    }

    pub fn domain_pieces(&self) -> Vec<Polyhedron> {
        let keep: Vec<usize> = (0..self.n).collect();
        self.pieces.iter().map(|p| p.project(&keep)).collect()
    }

    /// Graph of the inverse: `(x, v) -> (v, x)`.
    pub fn swapped(&self) -> PolyGraph {
        let n = self.n;
        let m: Vec<QVec> = (0..2 * n).map(|i| exact::unit(2 * n, (i + n) % (2 * n))).collect();
        self.mapped(&m)
    }

    /// Image under an invertible linear map of `R^{2n}`.
    fn mapped(&self, m: &[QVec]) -> PolyGraph {
        PolyGraph {
            n: self.n,
            pieces: self
                .pieces
                .iter()
                .map(|p| p.linear_image(m).expect("invertible map"))
                .collect(),
        }
    }

    /// All vertices of all pieces.
    pub fn vertices(&self) -> Vec<QVec> {
        let mut out: Vec<QVec> = self
            .pieces
            .iter()
            .filter_map(|p| p.vrep())
            .flat_map(|v| v.points)
            .collect();
        out.sort_by(|a, b| exact::cmp_vec(a, b));
        out.dedup();
        out
    }
}

fn slice_piece(p: &Polyhedron, n: usize, x: &[Rat]) -> Polyhedron {
    let m: Vec<QVec> = (0..2 * n)
        .map(|i| if i < n { exact::zeros(n) } else { exact::unit(n, i - n) })
        .collect();
    let mut c = x.to_vec();
    c.extend(exact::zeros(n));
    p.affine_preimage(&m, &c, n)
}

type VecFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type MatFn = dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync;

/// Single-valued differentiable map with its Jacobian (row-major).
#[derive(Clone)]
pub struct SmoothMap {
    name: String,
    n: usize,
    f: Arc<VecFn>,
    jac: Arc<MatFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({}, n={})", self.name, self.n)
    }
}

impl SmoothMap {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        jac: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> SmoothMap {
        SmoothMap {
            name: name.into(),
            n,
            f: Arc::new(f),
            jac: Arc::new(jac),
        }
    }

    /// `F(x) = A x + b`.
    pub fn affine(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<SmoothMap> {
        let n = b.len();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(MonoError::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        let a2 = a.clone();
        Ok(SmoothMap::new(
            "affine",
            n,
            move |x| {
                a.iter()
                    .zip(&b)
                    .map(|(row, bi)| row.iter().zip(x).map(|(r, x)| r * x).sum::<f64>() + bi)
                    .collect()
            },
            move |_| a2.clone(),
        ))
    }

    /// `F(x)_i = c x_i^3`.
    pub fn cubic(n: usize, c: f64) -> SmoothMap {
        SmoothMap::new(
            "cubic",
            n,
            move |x| x.iter().map(|v| c * v * v * v).collect(),
            move |x| {
                (0..x.len())
                    .map(|i| {
                        (0..x.len())
                            .map(|j| if i == j { 3.0 * c * x[i] * x[i] } else { 0.0 })
                            .collect()
                    })
                    .collect()
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        (self.jac)(x)
    }
}

/// Convex sets whose normal-cone operators are supported.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    Polyhedron(Polyhedron),
    Box { lo: QVec, hi: QVec },
    Halfspace { a: QVec, b: Rat },
    /// `{ (a, b) : b >= a^2 }` in R^2.
    Parabola,
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Polyhedron(p) => p.dim(),
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Halfspace { a, .. } => a.len(),
            ConvexSet::Parabola => 2,
        }
    }

    /// Inequality description, unless the set is the parabola.
    pub fn as_polyhedron(&self) -> Option<Polyhedron> {
        match self {
            ConvexSet::Polyhedron(p) => Some(p.clone()),
            ConvexSet::Box { lo, hi } => Some(Polyhedron::universe(lo.len()).clip_bounds(lo, hi)),
            ConvexSet::Halfspace { a, b } => Some(Polyhedron::universe(a.len()).with_ineq(a.clone(), b.clone())),
            ConvexSet::Parabola => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            ConvexSet::Polyhedron(_) => "polyhedron",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Parabola => "parabola",
        }
    }
}

/// The normal-cone operator of a convex set, with its graph precomputed when
/// the set is polyhedral.
#[derive(Clone, Debug)]
pub struct NormalConeOp {
    set: ConvexSet,
    graph: Option<PolyGraph>,
}

impl NormalConeOp {
    pub fn new(set: ConvexSet) -> Result<NormalConeOp> {
        let graph = match set.as_polyhedron() {
            Some(p) => {
                if p.is_empty() {
                    return Err(MonoError::InvalidInput("empty convex set".into()));
                }
                Some(normal_cone_graph(&p))
            }
            None => None,
        };
        Ok(NormalConeOp { set, graph })
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }
}

/// `gph N_P` as the union over faces `F` of `F x (cone of active normals)`.
fn normal_cone_graph(p: &Polyhedron) -> PolyGraph {
    let n = p.dim();
    let eq_rows: Vec<QVec> = p.eqs().iter().map(|c| c.a.clone()).collect();
    let pieces = p
        .faces()
        .into_iter()
        .map(|f| {
            let rays: Vec<QVec> = f.tight.iter().map(|&i| p.ineqs()[i].a.clone()).collect();
            let cone = VRep::from_parts_raw(n, vec![exact::zeros(n)], rays, eq_rows.clone()).to_hrep();
            f.poly.product(&cone)
        })
        .collect();
    PolyGraph { n, pieces }
}

/// Finite list of graph points.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph {
    n: usize,
    points: Vec<GraphPoint>,
}

impl SampledGraph {
    pub fn new(n: usize, points: Vec<GraphPoint>) -> Result<SampledGraph> {
        for p in &points {
            check_dim(n, p.x.len())?;
            check_dim(n, p.v.len())?;
        }
        Ok(SampledGraph { n, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[GraphPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Pointwise image under `f`.
    pub fn map(&self, f: impl Fn(&GraphPoint) -> GraphPoint) -> SampledGraph {
        SampledGraph {
            n: self.n,
            points: self.points.iter().map(f).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Composite {
    Sum(Operator, Operator),
    Inverse(Operator),
    ShiftJ { op: Operator, sigma: f64, spec: NormSpec },
    Scale { op: Operator, c: f64 },
    Localize { op: Operator, region: GraphBox },
}

#[derive(Debug)]
pub struct CompositeNode {
    kind: Composite,
    local: OnceLock<Option<(PolyGraph, Vec<GraphBox>)>>,
}

impl CompositeNode {
    pub fn kind(&self) -> &Composite {
        &self.kind
    }
}

#[derive(Clone, Debug)]
pub enum Operator {
    Polyhedral(PolyGraph),
    Smooth(SmoothMap),
    NormalCone(NormalConeOp),
    Sampled(SampledGraph),
    Composite(Arc<CompositeNode>),
}

fn composite(kind: Composite) -> Operator {
    Operator::Composite(Arc::new(CompositeNode {
        kind,
        local: OnceLock::new(),
    }))
}

pub fn op_sum(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dim(a.dim(), b.dim())?;
    Ok(composite(Composite::Sum(a.clone(), b.clone())))
}

pub fn op_inverse(a: &Operator) -> Operator {
    composite(Composite::Inverse(a.clone()))
}

pub fn op_shift_j(a: &Operator, sigma: f64, spec: &NormSpec) -> Result<Operator> {
    spec.check(a.dim())?;
    if !sigma.is_finite() {
        return Err(MonoError::InvalidInput("sigma must be finite".into()));
    }
    Ok(composite(Composite::ShiftJ {
        op: a.clone(),
        sigma,
        spec: spec.clone(),
    }))
}

pub fn op_scale(a: &Operator, c: f64) -> Result<Operator> {
    if !c.is_finite() {
        return Err(MonoError::InvalidInput("scale must be finite".into()));
    }
    Ok(composite(Composite::Scale { op: a.clone(), c }))
}

pub fn op_localize(a: &Operator, region: &GraphBox) -> Result<Operator> {
    check_dim(a.dim(), region.dim())?;
    Ok(composite(Composite::Localize {
        op: a.clone(),
        region: region.clone(),
    }))
}

impl Operator {
    pub fn polyhedral(n: usize, pieces: Vec<Polyhedron>) -> Result<Operator> {
        Ok(Operator::Polyhedral(PolyGraph::new(n, pieces)?))
    }

    pub fn normal_cone(set: ConvexSet) -> Result<Operator> {
        Ok(Operator::NormalCone(NormalConeOp::new(set)?))
    }

    pub fn sampled(n: usize, points: Vec<GraphPoint>) -> Result<Operator> {
        Ok(Operator::Sampled(SampledGraph::new(n, points)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Polyhedral(g) => g.n,
            Operator::Smooth(s) => s.n,
            Operator::NormalCone(nc) => nc.set.dim(),
            Operator::Sampled(s) => s.n,
            Operator::Composite(c) => match &c.kind {
                Composite::Sum(a, _) | Composite::Inverse(a) => a.dim(),
                Composite::ShiftJ { op, .. } | Composite::Scale { op, .. } | Composite::Localize { op, .. } => op.dim(),
            },
        }
    }

    /// Short structural description.
    pub fn describe(&self) -> String {
        match self {
            Operator::Polyhedral(g) => format!("polyhedral({} pieces)", g.pieces.len()),
            Operator::Smooth(s) => format!("smooth({})", s.name),
            Operator::NormalCone(nc) => format!("normal_cone({})", nc.set.label()),
            Operator::Sampled(s) => format!("sampled({} points)", s.points.len()),
            Operator::Composite(c) => match &c.kind {
                Composite::Sum(a, b) => format!("sum({}, {})", a.describe(), b.describe()),
                Composite::Inverse(a) => format!("inverse({})", a.describe()),
                Composite::ShiftJ { op, sigma, .. } => format!("shift({}, {})", op.describe(), sigma),
                Composite::Scale { op, c } => format!("scale({}, {})", op.describe(), c),
                Composite::Localize { op, .. } => format!("localize({})", op.describe()),
            },
        }
    }

    /// Exact polyhedral graph, when the operator has one.
    pub fn graph(&self) -> Option<PolyGraph> {
        match self.local_graph()? {
            (g, regions) if regions.is_empty() => Some(g),
            _ => None,
        }
    }

    /// Exact polyhedral graph together with the localization regions it is
    /// restricted to.
    pub fn local_graph(&self) -> Option<(PolyGraph, Vec<GraphBox>)> {
        match self {
            Operator::Polyhedral(g) => Some((g.clone(), Vec::new())),
            Operator::NormalCone(nc) => nc.graph.clone().map(|g| (g, Vec::new())),
            Operator::Sampled(s) if s.points.len() <= 256 => {
                let pieces = s
                    .points
                    .iter()
                    .map(|p| Polyhedron::point(&exact::vec_from_f64(&p.stacked())))
                    .collect();
                Some((PolyGraph { n: s.n, pieces }, Vec::new()))
            }
            Operator::Sampled(_) | Operator::Smooth(_) => None,
            Operator::Composite(c) => c.local.get_or_init(|| materialize(&c.kind)).clone(),
        }
    }

    /// `T(x)` without any ball restriction.
    pub fn value_at(&self, x: &[f64], tol: f64) -> Result<ValueSet> {
        check_dim(self.dim(), x.len())?;
        match self {
            Operator::Smooth(s) => Ok(ValueSet::points(vec![s.apply(x)])),
            Operator::Sampled(s) => Ok(ValueSet::points(
                s.points
                    .iter()
                    .filter(|p| p.x.iter().zip(x).all(|(a, b)| (a - b).abs() <= tol))
                    .map(|p| p.v.clone())
                    .collect(),
            )),
            Operator::NormalCone(nc) if nc.graph.is_none() => Ok(parabola_normal(x, tol)),
            _ => {
                if let Some((g, regions)) = self.local_graph() {
                    return Ok(slice_graph(&g, &regions, x, tol));
                }
                match self {
                    Operator::Composite(c) => composite_value(&c.kind, x, tol),
                    _ => unreachable!("non-composite operators are handled above"),
                }
            }
        }
    }

    /// `T(x)` intersected with the dual ball of `bx`.
    pub fn evaluate(&self, x: &[f64], bx: &GraphBox, tol: f64) -> Result<ValueSet> {
        check_dim(self.dim(), bx.dim())?;
        if !bx.contains_x(x, tol) {
            return Err(MonoError::InvalidInput("x lies outside the primal ball of the box".into()));
        }
        Ok(restrict(self.value_at(x, tol)?, bx))
    }

    pub fn contains_pair(&self, x: &[f64], v: &[f64], tol: f64) -> Result<bool> {
        Ok(self.value_at(x, tol)?.contains(v, tol))
    }

    /// Whether the operator is locally given by a smooth single-valued map.
    pub fn smooth_map(&self) -> Option<&SmoothMap> {
        match self {
            Operator::Smooth(s) => Some(s),
            _ => None,
        }
    }
}

fn restrict(vs: ValueSet, bx: &GraphBox) -> ValueSet {
    match vs {
        ValueSet::Empty => ValueSet::Empty,
        ValueSet::Points(ps) => ValueSet::points(ps.into_iter().filter(|v| bx.contains_v(v, 0.0)).collect()),
        ValueSet::Slice { pieces, mut within } => {
            let (lo, hi) = bx.v_cube();
            let (lo, hi) = (exact::vec_from_f64(&lo), exact::vec_from_f64(&hi));
            let pieces = pieces.iter().map(|p| p.clip_bounds(&lo, &hi)).collect();
            within.push(bx.clone());
            ValueSet::slice(pieces, within)
        }
    }
}

fn slice_graph(g: &PolyGraph, regions: &[GraphBox], x: &[f64], tol: f64) -> ValueSet {
    if !regions.iter().all(|r| r.contains_x(x, tol)) {
        return ValueSet::Empty;
    }
    let xq = exact::vec_from_f64(x);
    let mut pieces = g.slice(&xq);
    if pieces.is_empty() && tol > 0.0 {
        // Snap onto nearby domain pieces to absorb rounding of x.
        let keep: Vec<usize> = (0..g.n).collect();
        for p in &g.pieces {
            let dom = p.project(&keep);
            if let Some(q) = dom.nearest_point(&xq) {
                let d = exact::vec_to_f64(&exact::sub(&q, &xq));
                if crate::normgeom::euclid(&d) <= tol {
                    let s = slice_piece(p, g.n, &q);
                    if !s.is_empty() {
                        pieces.push(s);
                    }
                }
            }
        }
    }
    let mut out = ValueSet::slice(pieces, Vec::new());
    for r in regions {
        out = restrict(out, r);
    }
    out
}

fn parabola_normal(x: &[f64], tol: f64) -> ValueSet {
    let gap = x[1] - x[0] * x[0];
    if gap < -tol {
        ValueSet::Empty
    } else if gap > tol {
        ValueSet::points(vec![vec![0.0, 0.0]])
    } else {
        let a = exact::from_f64(x[0]);
        let ray = vec![exact::int(2) * a, -Rat::one()];
        ValueSet::slice(
            vec![VRep::from_parts_raw(2, vec![exact::zeros(2)], vec![ray], vec![]).to_hrep()],
            Vec::new(),
        )
    }
}

fn composite_value(kind: &Composite, x: &[f64], tol: f64) -> Result<ValueSet> {
    match kind {
        Composite::Sum(a, b) => minkowski(a.value_at(x, tol)?, b.value_at(x, tol)?),
        Composite::Inverse(a) => match a {
            Operator::Sampled(s) => Ok(ValueSet::points(
                s.points
                    .iter()
                    .filter(|p| p.v.iter().zip(x).all(|(a, b)| (a - b).abs() <= tol))
                    .map(|p| p.x.clone())
                    .collect(),
            )),
            _ => Err(MonoError::Unsupported(format!("inverse of {}", a.describe()))),
        },
        Composite::ShiftJ { op, sigma, spec } => {
            let j = duality_map(x, spec)?;
            let t: Vec<f64> = j.iter().map(|v| sigma * v).collect();
            Ok(translate(op.value_at(x, tol)?, &t))
        }
        Composite::Scale { op, c } => Ok(scale(op.value_at(x, tol)?, *c)),
        Composite::Localize { op, region } => {
            if !region.contains_x(x, tol) {
                return Ok(ValueSet::Empty);
            }
            Ok(restrict(op.value_at(x, tol)?, region))
        }
    }
}

fn translate(vs: ValueSet, t: &[f64]) -> ValueSet {
    match vs {
        ValueSet::Empty => ValueSet::Empty,
        ValueSet::Points(ps) => ValueSet::points(
            ps.into_iter()
                .map(|p| p.iter().zip(t).map(|(a, b)| a + b).collect())
                .collect(),
        ),
        ValueSet::Slice { pieces, within } => {
            let tq = exact::vec_from_f64(t);
            ValueSet::Slice {
                pieces: pieces.iter().map(|p| p.translate(&tq)).collect(),
                within: within
                    .into_iter()
                    .map(|mut b| {
                        b.v_center = b.v_center.iter().zip(t).map(|(a, b)| a + b).collect();
                        b
                    })
                    .collect(),
            }
        }
    }
}

fn scale(vs: ValueSet, c: f64) -> ValueSet {
    match vs {
        ValueSet::Empty => ValueSet::Empty,
        ValueSet::Points(ps) => ValueSet::points(ps.into_iter().map(|p| p.iter().map(|a| c * a).collect()).collect()),
        ValueSet::Slice { pieces, within } => {
            let n = pieces[0].dim();
            if c == 0.0 {
                return ValueSet::points(vec![vec![0.0; n]]);
            }
            let cq = exact::from_f64(c);
            let m: Vec<QVec> = (0..n).map(|i| exact::scale(&cq, &exact::unit(n, i))).collect();
            ValueSet::Slice {
                pieces: pieces.iter().map(|p| p.linear_image(&m).expect("nonzero scale")).collect(),
                within: within
                    .into_iter()
                    .map(|mut b| {
                        b.v_center = b.v_center.iter().map(|a| c * a).collect();
                        b.v_radius *= c.abs();
                        b
                    })
                    .collect(),
            }
        }
    }
}

/// Replaces ball restrictions by exact interval clipping in dimension one.
fn flatten_balls(pieces: Vec<Polyhedron>, within: Vec<GraphBox>) -> Result<Vec<Polyhedron>> {
    if within.is_empty() {
        return Ok(pieces);
    }
    if pieces.first().is_some_and(|p| p.dim() != 1) {
        return Err(MonoError::Unsupported(
            "Minkowski sum with a ball-restricted value set in dimension > 1".into(),
        ));
    }
    let mut out = pieces;
    for b in &within {
        let (lo, hi) = b.v_cube();
        let (lo, hi) = (exact::vec_from_f64(&lo), exact::vec_from_f64(&hi));
        out = out.iter().map(|p| p.clip_bounds(&lo, &hi)).collect();
    }
    Ok(out)
}

fn minkowski(a: ValueSet, b: ValueSet) -> Result<ValueSet> {
    Ok(match (a, b) {
        (ValueSet::Empty, _) | (_, ValueSet::Empty) => ValueSet::Empty,
        (ValueSet::Points(p), ValueSet::Points(q)) => {
            let mut out = Vec::new();
            for u in &p {
                for w in &q {
                    out.push(u.iter().zip(w).map(|(a, b)| a + b).collect());
                }
            }
            ValueSet::points(out)
        }
        (ValueSet::Points(p), ValueSet::Slice { pieces, within })
        | (ValueSet::Slice { pieces, within }, ValueSet::Points(p)) => {
            let pieces = flatten_balls(pieces, within)?;
            let mut out = Vec::new();
            for u in &p {
                let uq = exact::vec_from_f64(u);
                out.extend(pieces.iter().map(|s| s.translate(&uq)));
            }
            ValueSet::slice(out, Vec::new())
        }
        (ValueSet::Slice { pieces: pa, within: wa }, ValueSet::Slice { pieces: pb, within: wb }) => {
            let pa = flatten_balls(pa, wa)?;
            let pb = flatten_balls(pb, wb)?;
            let mut out = Vec::new();
            for s in &pa {
                for t in &pb {
                    out.push(s.minkowski_sum(t));
                }
            }
            ValueSet::slice(out, Vec::new())
        }
    })
}

fn materialize(kind: &Composite) -> Option<(PolyGraph, Vec<GraphBox>)> {
    match kind {
        Composite::Localize { op, region } => {
            let (g, mut regions) = op.local_graph()?;
            regions.push(region.clone());
            Some((g, regions))
        }
        Composite::Inverse(a) => {
            let (g, regions) = a.local_graph()?;
            let mut swapped = Vec::new();
            for r in regions {
                if !r.norm.is_euclidean() {
                    return None;
                }
                swapped.push(GraphBox {
                    x_center: r.v_center,
                    x_radius: r.v_radius,
                    v_center: r.x_center,
                    v_radius: r.x_radius,
                    norm: r.norm,
                });
            }
            Some((g.swapped(), swapped))
        }
        Composite::Sum(a, b) => {
            if let (Some(ga), Some(gb)) = (a.graph(), b.graph()) {
                return Some((sum_graphs(&ga, &gb), Vec::new()));
            }
            let is_parabola = |o: &Operator| matches!(o, Operator::NormalCone(nc) if nc.set == ConvexSet::Parabola);
            if is_parabola(a) {
                return sum_with_parabola(&b.graph()?).map(|g| (g, Vec::new()));
            }
            if is_parabola(b) {
                return sum_with_parabola(&a.graph()?).map(|g| (g, Vec::new()));
            }
            None
        }
        Composite::ShiftJ { op, sigma, spec } => {
            let g = op.graph()?;
            if !spec.is_hilbertian() || !sigma.is_finite() {
                return None;
            }
            let n = g.n;
            let s = exact::from_f64(*sigma);
            let m: Vec<QVec> = (0..2 * n)
                .map(|i| {
                    let mut row = exact::unit(2 * n, i);
                    if i >= n {
                        row[i - n] = &s * exact::from_f64(spec.weights()[i - n]);
                    }
                    row
                })
                .collect();
            Some((g.mapped(&m), Vec::new()))
        }
        Composite::Scale { op, c } => {
            let g = op.graph()?;
            let n = g.n;
            if *c == 0.0 {
                let zero = Polyhedron::point(&exact::zeros(n));
                let pieces = g.domain_pieces().iter().map(|d| d.product(&zero)).collect();
                return Some((PolyGraph { n, pieces }, Vec::new()));
            }
            let cq = exact::from_f64(*c);
            let m: Vec<QVec> = (0..2 * n)
                .map(|i| {
                    let u = exact::unit(2 * n, i);
                    if i >= n {
                        exact::scale(&cq, &u)
                    } else {
                        u
                    }
                })
                .collect();
            Some((g.mapped(&m), Vec::new()))
        }
    }
}

/// `{ (x, v1 + v2) : (x, v1) in a, (x, v2) in b }`, piece by piece.
fn sum_graphs(a: &PolyGraph, b: &PolyGraph) -> PolyGraph {
    let n = a.n;
    // Variables (x, s, v2); a sees (x, s - v2), b sees (x, v2).
    let ma: Vec<QVec> = (0..2 * n)
        .map(|i| {
            let mut row = exact::zeros(3 * n);
            if i < n {
                row[i] = Rat::one();
            } else {
                row[i] = Rat::one();
                row[i + n] = -Rat::one();
            }
            row
        })
        .collect();
    let mb: Vec<QVec> = (0..2 * n)
        .map(|i| {
            let mut row = exact::zeros(3 * n);
            if i < n {
                row[i] = Rat::one();
            } else {
                row[i + n] = Rat::one();
            }
            row
        })
        .collect();
    let zero = exact::zeros(2 * n);
    let keep: Vec<usize> = (0..2 * n).collect();
    let mut pieces = Vec::new();
    for p in &a.pieces {
        let pa = p.affine_preimage(&ma, &zero, 3 * n);
        for q in &b.pieces {
            let joint = pa.intersect(&q.affine_preimage(&mb, &zero, 3 * n));
            if joint.is_empty() {
                continue;
            }
            let s = joint.project(&keep);
            if !pieces.contains(&s) {
                pieces.push(s);
            }
        }
    }
    PolyGraph { n, pieces }
}

/// Sum of the parabola normal cone with a polyhedral operator, available when
/// every domain piece meets the parabola epigraph in finitely many points.
fn sum_with_parabola(g: &PolyGraph) -> Option<PolyGraph> {
    if g.n != 2 {
        return None;
    }
    let mut pieces = Vec::new();
    for q in &g.pieces {
        for p in parabola_meets(&q.project(&[0, 1]))? {
            let slice = slice_piece(q, 2, &p);
            let on_boundary = p[1] == &p[0] * &p[0];
            let value = if on_boundary {
                let ray = vec![exact::int(2) * &p[0], -Rat::one()];
                let cone = VRep::from_parts_raw(2, vec![exact::zeros(2)], vec![ray], vec![]).to_hrep();
                slice.minkowski_sum(&cone)
            } else {
                slice
            };
            pieces.push(Polyhedron::point(&p).product(&value));
        }
    }
    Some(PolyGraph { n: 2, pieces })
}

/// Points of `d` with `y >= x^2`, or `None` when there are infinitely many.
fn parabola_meets(d: &Polyhedron) -> Option<Vec<QVec>> {
    let in_epi = |p: &QVec| p[1] >= &p[0] * &p[0];
    let v = d.vrep()?;
    match v.affine_dim() {
        0 => Some(v.points.iter().filter(|p| in_epi(p)).cloned().collect()),
        1 => {
            let base = v.points[0].clone();
            let dir = v
                .lineality
                .first()
                .or(v.rays.first())
                .cloned()
                .unwrap_or_else(|| exact::sub(&v.points[1], &v.points[0]));
            // Parameter interval of the line through base along dir inside d.
            let (mut lo, mut hi): (Option<Rat>, Option<Rat>) = (None, None);
            for c in d.ineqs() {
                let ad = exact::dot(&c.a, &dir);
                let slack = &c.b - exact::dot(&c.a, &base);
                if ad.is_positive() {
                    let t = slack / ad;
                    hi = Some(hi.map_or(t.clone(), |h: Rat| h.min(t)));
                } else if ad.is_negative() {
                    let t = slack / ad;
                    lo = Some(lo.map_or(t.clone(), |l: Rat| l.max(t)));
                }
            }
            let a = &dir[0] * &dir[0];
            let b = exact::int(2) * &base[0] * &dir[0] - &dir[1];
            let c = &base[0] * &base[0] - &base[1];
            let within = |t: &Rat| lo.as_ref().is_none_or(|l| t >= l) && hi.as_ref().is_none_or(|h| t <= h);
            let at = |t: &Rat| exact::add(&base, &exact::scale(t, &dir));
            if a.is_zero() {
                if b.is_zero() {
                    return if c.is_positive() { Some(vec![]) } else { None };
                }
                // b t + c <= 0 is a halfline in t; intersect with [lo, hi].
                let t0 = -c / &b;
                let (l, h) = if b.is_positive() {
                    (lo.clone(), Some(hi.clone().map_or(t0.clone(), |h| h.min(t0.clone()))))
                } else {
                    (Some(lo.clone().map_or(t0.clone(), |l| l.max(t0.clone()))), hi.clone())
                };
                match (l, h) {
                    (Some(l), Some(h)) if l > h => Some(vec![]),
                    (Some(l), Some(h)) if l == h => Some(vec![at(&l)]),
                    _ => None,
                }
            } else {
                let disc = &b * &b - exact::int(4) * &a * &c;
                if disc.is_negative() {
                    Some(vec![])
                } else if disc.is_zero() {
                    let t0 = -b / (exact::int(2) * a);
                    Some(if within(&t0) { vec![at(&t0)] } else { vec![] })
                } else {
                    None
                }
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests;
