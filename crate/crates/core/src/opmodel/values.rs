use super::region::{sort_dedup_f64, GraphBox};
use crate::exact::{self, QVec, Rat};
use crate::normgeom::euclid;
use crate::polyhedron::Polyhedron;

/// A finite description of `T(x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueSet {
    Empty,
    Points(Vec<Vec<f64>>),
    /// Union of polyhedra intersected with the dual balls of `within`.
    Slice {
        pieces: Vec<Polyhedron>,
        within: Vec<GraphBox>,
    },
}

impl ValueSet {
    pub(crate) fn points(pts: Vec<Vec<f64>>) -> ValueSet {
        if pts.is_empty() {
            ValueSet::Empty
        } else {
            ValueSet::Points(sort_dedup_f64(pts))
        }
    }

    pub(crate) fn slice(pieces: Vec<Polyhedron>, within: Vec<GraphBox>) -> ValueSet {
        let pieces: Vec<Polyhedron> = pieces.into_iter().filter(|p| !p.is_empty()).collect();
        if pieces.is_empty() {
            return ValueSet::Empty;
        }
        let out = ValueSet::Slice { pieces, within };
        if out.has_witness_point() {
            out
        } else {
            ValueSet::Empty
        }
    }

    fn has_witness_point(&self) -> bool {
        match self {
            ValueSet::Slice { within, .. } if within.is_empty() => true,
            _ => !self.sample(3).is_empty(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ValueSet::Empty)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        match self {
            ValueSet::Empty => false,
            ValueSet::Points(ps) => ps.iter().any(|p| dist(p, v) <= tol),
            ValueSet::Slice { pieces, within } => {
                within.iter().all(|b| b.contains_v(v, tol))
                    && pieces.iter().any(|p| p.contains_f64(v, tol))
            }
        }
    }

    /// Euclidean distance from `v` (ball restrictions are ignored for slices).
    pub fn distance(&self, v: &[f64]) -> f64 {
        match self {
            ValueSet::Empty => f64::INFINITY,
            ValueSet::Points(ps) => ps.iter().map(|p| dist(p, v)).fold(f64::INFINITY, f64::min),
            ValueSet::Slice { pieces, .. } => {
                let z = exact::vec_from_f64(v);
                pieces
                    .iter()
                    .filter_map(|p| p.nearest_point(&z))
                    .map(|q| dist(&exact::vec_to_f64(&q), v))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Deterministic finite subset: explicit points, or for slices the
    /// vertices of each piece clipped to the bounding cubes of the balls,
    /// pairwise interpolations, and a grid over the clipped piece.
    pub fn sample(&self, density: usize) -> Vec<Vec<f64>> {
        match self {
            ValueSet::Empty => Vec::new(),
            ValueSet::Points(ps) => ps.clone(),
            ValueSet::Slice { pieces, within } => {
                let mut out = Vec::new();
                for p in pieces {
                    let mut q = p.clone();
                    for b in within {
                        let (lo, hi) = b.v_cube();
                        q = q.clip_bounds(&exact::vec_from_f64(&lo), &exact::vec_from_f64(&hi));
                    }
                    out.extend(sample_polytope(&q, density, None));
                }
                out.retain(|v| within.iter().all(|b| b.contains_v(v, 0.0)));
                sort_dedup_f64(out)
            }
        }
    }

    /// Vertices of each (possibly unbounded) piece, or the explicit points.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            ValueSet::Empty => Vec::new(),
            ValueSet::Points(ps) => ps.clone(),
            ValueSet::Slice { pieces, .. } => sort_dedup_f64(
                pieces
                    .iter()
                    .filter_map(|p| p.vrep())
                    .flat_map(|v| v.points_f64())
                    .collect(),
            ),
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    euclid(&d)
}

/// Samples a polyhedron that is expected to be bounded: vertices, evenly
/// spaced points on every vertex pair, and the grid points of its bounding
/// box that lie inside. When `lattice` is given, only those grid points are
/// used instead of the bounding-box grid.
pub(crate) fn sample_polytope(p: &Polyhedron, density: usize, lattice: Option<&[QVec]>) -> Vec<Vec<f64>> {
    let Some(vr) = p.vrep() else {
        return Vec::new();
    };
    if !vr.is_bounded() {
        return vr.points_f64();
    }
    let density = density.max(2);
    let verts = &vr.points;
    let mut out: Vec<QVec> = verts.clone();
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            for k in 1..density - 1 {
                let t = exact::ratio(k as i64, (density - 1) as i64);
                let s = Rat::from_integer(1.into()) - &t;
                out.push(exact::add(&exact::scale(&s, &verts[i]), &exact::scale(&t, &verts[j])));
            }
        }
    }
    match lattice {
        Some(l) => out.extend(l.iter().filter(|z| p.contains(z)).cloned()),
        None => {
            let d = p.dim();
            let mut lo = verts[0].clone();
            let mut hi = verts[0].clone();
            for v in verts {
                for i in 0..d {
                    if v[i] < lo[i] {
                        lo[i] = v[i].clone();
                    }
                    if v[i] > hi[i] {
                        hi[i] = v[i].clone();
                    }
                }
            }
            for z in rational_grid(&lo, &hi, density) {
                if p.contains(&z) {
                    out.push(z);
                }
            }
        }
    }
    out.sort_by(|a, b| exact::cmp_vec(a, b));
    out.dedup();
    out.iter().map(|z| exact::vec_to_f64(z)).collect()
}

pub(crate) fn rational_grid(lo: &[Rat], hi: &[Rat], density: usize) -> Vec<QVec> {
    let density = density.max(2);
    let mut out: Vec<QVec> = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        let mut next = Vec::new();
        for p in &out {
            for k in 0..density {
                let t = exact::ratio(k as i64, (density - 1) as i64);
                let mut q = p.clone();
                q.push(a + (b - a) * t);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
