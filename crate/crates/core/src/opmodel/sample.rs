use super::region::GraphBox;
use super::values::{rational_grid, sample_polytope};
use super::{Composite, ConvexSet, Operator, PolyGraph, SampledGraph};
use crate::error::{MonoError, Result};
use crate::exact::{self, QVec};
use crate::normgeom::{euclid, GraphPoint};
use crate::polyhedron::Polyhedron;

/// Deterministic sample of `gph op` inside `bx`: piece vertices, segments
/// between them and grid slices for polyhedral graphs, grid images for
/// everything else. Points are sorted and free of duplicates.
pub fn sample_graph(op: &Operator, bx: &GraphBox, density: usize) -> Result<SampledGraph> {
    if density < 2 {
        return Err(MonoError::InvalidInput("density must be at least 2".into()));
    }
    crate::error::check_dim(op.dim(), bx.dim())?;
    let mut pts = raw_samples(op, bx, density)?;
    pts.retain(|p| bx.contains(p, 0.0));
    pts.sort_by(|a, b| super::region::cmp_f64_vec(&a.stacked(), &b.stacked()));
    pts.dedup();
    if pts.is_empty() {
        return Err(MonoError::EmptyGraph);
    }
    SampledGraph::new(op.dim(), pts)
}

fn raw_samples(op: &Operator, bx: &GraphBox, density: usize) -> Result<Vec<GraphPoint>> {
    if let Some((g, regions)) = op.local_graph() {
        return Ok(sample_pieces(&g, &regions, bx, density));
    }
    let tol = bx.default_tol();
    match op {
        Operator::Smooth(s) => Ok(bx
            .x_grid(density)
            .into_iter()
            .map(|x| GraphPoint {
                v: s.apply(&x),
                x,
            })
            .collect()),
        Operator::Sampled(s) => Ok(s.points().to_vec()),
        Operator::NormalCone(nc) if nc.set == ConvexSet::Parabola => Ok(parabola_samples(bx, density)),
        Operator::Composite(c) if matches!(c.kind, Composite::Localize { .. }) => {
            let Composite::Localize { op, region } = &c.kind else {
                unreachable!()
            };
            match sample_graph(op, bx, density) {
                Ok(g) => Ok(g
                    .points()
                    .iter()
                    .filter(|p| region.contains(p, 0.0))
                    .cloned()
                    .collect()),
                Err(MonoError::EmptyGraph) => Ok(Vec::new()),
                Err(e) => Err(e),
            }
        }
        _ => {
            let mut out = Vec::new();
            for x in bx.x_grid(density) {
                let vs = op.evaluate(&x, bx, tol)?;
                for v in vs.sample(density) {
                    out.push(GraphPoint { x: x.clone(), v });
                }
            }
            Ok(out)
        }
    }
}

fn cube_bounds(bx: &GraphBox) -> (QVec, QVec) {
    let (xl, xh) = bx.x_cube();
    let (vl, vh) = bx.v_cube();
    let mut lo = exact::vec_from_f64(&xl);
    lo.extend(exact::vec_from_f64(&vl));
    let mut hi = exact::vec_from_f64(&xh);
    hi.extend(exact::vec_from_f64(&vh));
    (lo, hi)
}

fn sample_pieces(g: &PolyGraph, regions: &[GraphBox], bx: &GraphBox, density: usize) -> Vec<GraphPoint> {
    let n = g.n();
    let (lo, hi) = cube_bounds(bx);
    let (xl, xh) = bx.x_cube();
    let mut lattice = rational_grid(&exact::vec_from_f64(&xl), &exact::vec_from_f64(&xh), density);
    lattice.push(exact::vec_from_f64(&bx.x_center));
    let mut out = Vec::new();
    for piece in g.pieces() {
        let mut clipped = piece.clip_bounds(&lo, &hi);
        for r in regions {
            let (rl, rh) = cube_bounds(r);
            clipped = clipped.clip_bounds(&rl, &rh);
        }
        if clipped.is_empty() {
            continue;
        }
        for z in sample_polytope(&clipped, density, Some(&[])) {
            out.push(GraphPoint::from_stacked(&z));
        }
        for x in &lattice {
            let s = super::slice_piece(&clipped, n, x);
            let xf = exact::vec_to_f64(x);
            for v in sample_polytope(&s, density, None) {
                out.push(GraphPoint { x: xf.clone(), v });
            }
        }
    }
    out.retain(|p| regions.iter().all(|r| r.contains(p, 0.0)));
    out
}

fn parabola_samples(bx: &GraphBox, density: usize) -> Vec<GraphPoint> {
    let mut out = Vec::new();
    let (xl, xh) = bx.x_cube();
    let vmax = euclid(&bx.v_center) + bx.v_radius * 2.0;
    for k in 0..density {
        let a = xl[0] + (xh[0] - xl[0]) * k as f64 / (density - 1) as f64;
        let x = vec![a, a * a];
        let dir = [2.0 * a, -1.0];
        let tmax = vmax / euclid(&dir);
        for j in 0..density {
            let t = tmax * j as f64 / (density - 1) as f64;
            out.push(GraphPoint {
                x: x.clone(),
                v: vec![t * dir[0], t * dir[1]],
            });
        }
    }
    for x in bx.x_grid(density) {
        if x[1] > x[0] * x[0] {
            out.push(GraphPoint { x, v: vec![0.0, 0.0] });
        }
    }
    out
}

/// Polyhedron of the clipped piece, exposed for plotting.
pub(crate) fn clipped_pieces(g: &PolyGraph, regions: &[GraphBox], bx: &GraphBox) -> Vec<Polyhedron> {
    let (lo, hi) = cube_bounds(bx);
    g.pieces()
        .iter()
        .map(|p| {
            let mut c = p.clip_bounds(&lo, &hi);
            for r in regions {
                let (rl, rh) = cube_bounds(r);
                c = c.clip_bounds(&rl, &rh);
            }
            c
        })
        .filter(|c| !c.is_empty())
        .collect()
}
