//! Normal cones to finite unions of polyhedra, coderivatives and the
//! positive-semidefiniteness criteria for local maximal monotonicity.
//!
//! Graph space is `R^n x R^n` with points `(x, v)`. A normal `(n_x, n_v)` to
//! the graph at `(u, v)` corresponds to the coderivative pair
//! `(w, z) = (-n_v, n_x)`, i.e. `z ∈ D*T(u, v)(w)`.

use crate::cone::{ConeUnion, PolyCone};
use crate::error::{MonoError, Result};
use crate::exact::{self, QVec, Rat};
use crate::monocheck::{graph_density, hypo_modulus, LEVELS};
use crate::normgeom::{euclid, inner, GraphPoint};
use crate::opmodel::{cmp_f64_vec, sample_graph, Composite, ConvexSet, GraphBox, Operator};
use crate::polyhedron::{Constraint, Polyhedron};
use crate::verdict::{Resolution, Status, Verdict, Witness};
use num_traits::{One, Signed, Zero};

/// Exact KKT enumeration is exponential in the number of cone generators;
/// cones with more generators are reported as INCONCLUSIVE.
pub const MAX_FORM_GENERATORS: usize = 12;

/// Homogeneous cone `{d : a.d <= 0 (active), e.d = 0}` of a piece at `z`.
fn tangent_at(p: &Polyhedron, z: &[Rat]) -> Polyhedron {
    p.tangent_cone(z)
}

/// Polar of a homogeneous H-description: `cone(a_i) + span(e_j)`.
fn polar_hrep(t: &Polyhedron) -> Polyhedron {
    let gens: Vec<QVec> = t.ineqs().iter().map(|c| c.a.clone()).collect();
    let lin: Vec<QVec> = t.eqs().iter().map(|c| c.a.clone()).collect();
    PolyCone::from_generators(t.dim(), gens, lin).hrep()
}

/// Regular normal cone to `∪ pieces` at `z`: the intersection of the polars
/// of the tangent cones of the pieces containing `z`.
pub fn regular_normal_cone(pieces: &[Polyhedron], z: &[Rat]) -> Result<PolyCone> {
    let active: Vec<&Polyhedron> = pieces.iter().filter(|p| p.contains(z)).collect();
    if active.is_empty() {
        return Err(MonoError::PointNotInSet);
    }
    let dim = z.len();
    let mut h = Polyhedron::universe(dim);
    for p in active {
        h = h.intersect(&polar_hrep(&tangent_at(p, z)));
    }
    Ok(PolyCone::from_hrep(&h))
}

/// Limiting normal cone to `∪ pieces` at `z`.
///
/// Near `z` the union coincides with `z + ∪ K_i` for the tangent cones `K_i`
/// of the active pieces, so it is enough to stratify that cone union: faces
/// of every `K_i` are split by the hyperplanes of all the others, and the
/// regular normal cone is evaluated at one relative interior point per cell.
pub fn limiting_normal_cone(pieces: &[Polyhedron], z: &[Rat]) -> Result<ConeUnion> {
    let cones: Vec<Polyhedron> = pieces
        .iter()
        .filter(|p| p.contains(z))
        .map(|p| tangent_at(p, z))
        .collect();
    if cones.is_empty() {
        return Err(MonoError::PointNotInSet);
    }
    Ok(limiting_of_cones(&cones))
}

fn limiting_of_cones(cones: &[Polyhedron]) -> ConeUnion {
    let dim = cones[0].dim();
    if cones.len() == 1 {
        let reg = PolyCone::from_hrep(&polar_hrep(&cones[0]));
        return ConeUnion::new(dim, vec![reg]);
    }
    let reps = cell_representatives(cones);
    let mut out = Vec::new();
    for d in reps {
        let reg = regular_normal_cone(cones, &d).expect("representatives lie in the union");
        out.push(reg);
    }
    ConeUnion::new(dim, out)
}

/// One relative interior point per cell of the stratification of `∪ cones`
/// induced by all of their hyperplanes, plus the origin.
fn cell_representatives(cones: &[Polyhedron]) -> Vec<QVec> {
    let dim = cones[0].dim();
    let mut hyperplanes: Vec<QVec> = Vec::new();
    for k in cones {
        for c in k.ineqs().iter().chain(k.eqs()) {
            let a = Constraint::new(c.a.clone(), Rat::zero()).normalized(true).a;
            if !exact::is_zero_vec(&a) && !hyperplanes.contains(&a) {
                hyperplanes.push(a);
            }
        }
    }
    let mut cells: Vec<Polyhedron> = Vec::new();
    for k in cones {
        for f in k.faces() {
            cells.push(f.poly);
        }
    }
    let mut cells = dedup_cells(cells);
    for h in &hyperplanes {
        let mut next = Vec::new();
        for c in cells {
            let Some(vr) = c.vrep() else { continue };
            let vals: Vec<Rat> = vr.rays.iter().map(|r| exact::dot(h, r)).collect();
            let crosses_lin = vr.lineality.iter().any(|l| !exact::dot(h, l).is_zero());
            let has_neg = vals.iter().any(|v| v.is_negative());
            let has_pos = vals.iter().any(|v| v.is_positive());
            let on = c.clone().with_eq(h.clone(), Rat::zero());
            if crosses_lin || (has_neg && has_pos) {
                next.push(c.clone().with_ineq(h.clone(), Rat::zero()));
                next.push(c.clone().with_ineq(exact::neg(h), Rat::zero()));
                next.push(on);
            } else if has_neg || has_pos {
                next.push(c);
                next.push(on);
            } else {
                next.push(c);
            }
        }
        cells = dedup_cells(next);
    }
    let mut reps: Vec<QVec> = cells
        .iter()
        .filter_map(|c| c.vrep().map(|v| v.relint_point()))
        .collect();
    reps.push(exact::zeros(dim));
    reps.sort_by(|a, b| exact::cmp_vec(a, b));
    reps.dedup();
    reps
}

fn dedup_cells(cells: Vec<Polyhedron>) -> Vec<Polyhedron> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for c in cells {
        if let Some(v) = c.vrep() {
            if !seen.contains(&v) {
                seen.push(v);
                out.push(c);
            }
        }
    }
    out
}

/// `(n_x, n_v) ↦ (w, z) = (-n_v, n_x)`.
fn normal_to_pair(n: usize) -> impl Fn(&QVec) -> QVec {
    move |g: &QVec| {
        let mut out: QVec = g[n..].iter().map(|c| -c).collect();
        out.extend(g[..n].iter().cloned());
        out
    }
}

/// First-order local description of a graph at a point: the graph
/// coincides near the point, to first order, with `pt + ∪ cones`.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub n: usize,
    pub cones: Vec<Polyhedron>,
    /// Built from exact data (polyhedral graphs at rational points).
    pub exact: bool,
}

/// Local model of `op` at `pt`.
pub fn local_model(op: &Operator, pt: &GraphPoint) -> Result<LocalModel> {
    let n = op.dim();
    crate::error::check_dim(n, pt.dim())?;
    let z = exact::vec_from_f64(&pt.stacked());
    if let Some((g, regions)) = op.local_graph() {
        if regions.iter().any(|r| !r.contains(pt, 0.0)) {
            return Err(MonoError::PointNotInSet);
        }
        let cones: Vec<Polyhedron> = g
            .pieces()
            .iter()
            .filter(|p| p.contains(&z))
            .map(|p| tangent_at(p, &z))
            .collect();
        if cones.is_empty() {
            return Err(MonoError::PointNotInSet);
        }
        return Ok(LocalModel { n, cones, exact: true });
    }
    match op {
        Operator::Smooth(s) => {
            let tol = 1e-9 * (1.0 + euclid(&pt.v));
            let fx = s.apply(&pt.x);
            if euclid(&fx.iter().zip(&pt.v).map(|(a, b)| a - b).collect::<Vec<_>>()) > tol {
                return Err(MonoError::PointNotInSet);
            }
            let jac = s.jacobian(&pt.x);
            let mut k = Polyhedron::universe(2 * n);
            for (i, row) in jac.iter().enumerate() {
                let mut a = exact::vec_from_f64(row);
                a.extend(exact::scale(&-Rat::one(), &exact::unit(n, i)));
                k = k.with_eq(a, Rat::zero());
            }
            Ok(LocalModel {
                n,
                cones: vec![k],
                exact: false,
            })
        }
        Operator::NormalCone(nc) if *nc.set() == ConvexSet::Parabola => parabola_model(pt),
        Operator::Composite(c) => match c.kind() {
            Composite::Localize { op, region } => {
                if !region.contains(pt, 0.0) {
                    return Err(MonoError::PointNotInSet);
                }
                local_model(op, pt)
            }
            _ => Err(MonoError::Unsupported(format!("coderivative of {}", op.describe()))),
        },
        _ => Err(MonoError::Unsupported(format!("coderivative of {}", op.describe()))),
    }
}

/// Normal cone to the parabola epigraph: interior points carry the zero
/// value, boundary points `(a, a^2)` the ray `t (2a, -1)`. Boundary points
/// with `t > 0` sit on a smooth two-dimensional sheet; at `t = 0` the sheet
/// meets the interior piece.
fn parabola_model(pt: &GraphPoint) -> Result<LocalModel> {
    let (x, v) = (&pt.x, &pt.v);
    let tol = 1e-9 * (1.0 + euclid(x) + euclid(v));
    let gap = x[1] - x[0] * x[0];
    let q = |c: f64| exact::from_f64(c);
    let two = exact::int(2);
    let zero = Rat::zero;
    let unit4 = |i: usize| exact::unit(4, i);
    if gap < -tol {
        return Err(MonoError::PointNotInSet);
    }
    if gap > tol {
        if euclid(v) > tol {
            return Err(MonoError::PointNotInSet);
        }
        let k = Polyhedron::universe(4).with_eq(unit4(2), zero()).with_eq(unit4(3), zero());
        return Ok(LocalModel {
            n: 2,
            cones: vec![k],
            exact: false,
        });
    }
    let a = q(x[0]);
    let t = -v[1];
    if t < -tol || (v[0] - 2.0 * x[0] * t).abs() > tol {
        return Err(MonoError::PointNotInSet);
    }
    let tangent_span = |gens: Vec<QVec>| -> Polyhedron {
        let rows = exact::nullspace(&gens, 4);
        rows.into_iter().fold(Polyhedron::universe(4), |k, r| k.with_eq(r, zero()))
    };
    let sheet = |t: Rat| vec![vec![Rat::one(), &two * &a, &two * &t, zero()], vec![zero(), zero(), &two * &a, -Rat::one()]];
    if t > tol {
        return Ok(LocalModel {
            n: 2,
            cones: vec![tangent_span(sheet(q(t)))],
            exact: false,
        });
    }
    // t = 0: interior piece {(d, 0) : d2 >= 2a d1} and the half-sheet
    // {(d1, 2a d1, 2a s, -s) : s >= 0}.
    let interior = Polyhedron::universe(4)
        .with_ineq(vec![&two * &a, -Rat::one(), zero(), zero()], zero())
        .with_eq(unit4(2), zero())
        .with_eq(unit4(3), zero());
    let half_sheet = tangent_span(sheet(zero())).with_ineq(unit4(3), zero());
    Ok(LocalModel {
        n: 2,
        cones: vec![interior, half_sheet],
        exact: false,
    })
}

/// Regular coderivative at `pt` as a cone of `(w, z)` pairs.
pub fn regular_coderivative(op: &Operator, pt: &GraphPoint) -> Result<PolyCone> {
    let m = local_model(op, pt)?;
    let zero = exact::zeros(2 * m.n);
    let cone = regular_normal_cone(&m.cones, &zero)?;
    Ok(cone.map(2 * m.n, normal_to_pair(m.n)))
}

/// Limiting coderivative at `pt` as a union of cones of `(w, z)` pairs.
pub fn limiting_coderivative(op: &Operator, pt: &GraphPoint) -> Result<ConeUnion> {
    let m = local_model(op, pt)?;
    Ok(limiting_of_cones(&m.cones).map(2 * m.n, normal_to_pair(m.n)))
}

/// Minimum of `<z, w> - σ|w|^2` over a cone of `(w, z)` pairs, restricted to
/// the simplex of its spanning generators.
#[derive(Clone, Debug, PartialEq)]
pub enum FormMin {
    Nonnegative,
    Negative { w: QVec, z: QVec, value: Rat },
    TooLarge(usize),
}

fn form(n: usize, sigma: &Rat, a: &[Rat], b: &[Rat]) -> Rat {
    let (aw, az) = (&a[..n], &a[n..]);
    let (bw, bz) = (&b[..n], &b[n..]);
    (exact::dot(az, bw) + exact::dot(bz, aw)) / exact::int(2) - sigma * exact::dot(aw, bw)
}

/// Decides the sign of the form on the cone exactly. A nonnegative
/// quadratic on a cone means a copositive Gram-type matrix on its
/// generators; the minimum over the simplex is attained at a KKT point of
/// some support set with a unique solution, so enumerating supports is
/// complete.
pub fn form_minimum(cone: &PolyCone, n: usize, sigma: &Rat) -> FormMin {
    let gens = cone.positive_spanning_set();
    let k = gens.len();
    if k == 0 {
        return FormMin::Nonnegative;
    }
    if k > MAX_FORM_GENERATORS {
        return FormMin::TooLarge(k);
    }
    let q: Vec<Vec<Rat>> = (0..k)
        .map(|i| (0..k).map(|j| form(n, sigma, &gens[i], &gens[j])).collect())
        .collect();
    let mut best: Option<(Rat, Vec<(usize, Rat)>)> = None;
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let s: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let m = s.len();
        // [Q_SS  -1] [λ]   [0]
        // [1^T    0] [μ] = [1]
        let mut rows: Vec<QVec> = Vec::with_capacity(m + 1);
        for &i in &s {
            let mut r: QVec = s.iter().map(|&j| q[i][j].clone()).collect();
            r.push(-Rat::one());
            rows.push(r);
        }
        let mut last = vec![Rat::one(); m];
        last.push(Rat::zero());
        rows.push(last);
        let mut rhs = vec![Rat::zero(); m];
        rhs.push(Rat::one());
        let Some(sol) = exact::solve_unique(&rows, &rhs, m + 1) else {
            continue;
        };
        if sol[..m].iter().any(|l| !l.is_positive()) {
            continue;
        }
        let mu = sol[m].clone();
        if best.as_ref().is_none_or(|(b, _)| mu < *b) {
            best = Some((mu, s.iter().copied().zip(sol[..m].iter().cloned()).collect()));
        }
    }
    match best {
        Some((value, lam)) if value.is_negative() => {
            let mut p = exact::zeros(2 * n);
            for (i, l) in lam {
                p = exact::add(&p, &exact::scale(&l, &gens[i]));
            }
            FormMin::Negative {
                w: p[..n].to_vec(),
                z: p[n..].to_vec(),
                value,
            }
        }
        _ => FormMin::Nonnegative,
    }
}

/// Scales a negative direction to `|w| = 1` and picks the sign with `w`
/// lexicographically positive when the opposite pair is also admissible.
fn normalize_witness(cone: &PolyCone, w: &QVec, z: &QVec, sigma: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let mut pair = w.clone();
    pair.extend(z.iter().cloned());
    let neg = exact::neg(&pair);
    let first = w.iter().find(|c| !c.is_zero());
    let flip = first.is_some_and(|c| c.is_negative()) && cone.contains(&neg);
    let (w, z) = if flip { (exact::neg(w), exact::neg(z)) } else { (w.clone(), z.clone()) };
    let wf = exact::vec_to_f64(&w);
    let zf = exact::vec_to_f64(&z);
    let s = euclid(&wf);
    let wf: Vec<f64> = wf.iter().map(|c| c / s).collect();
    let zf: Vec<f64> = zf.iter().map(|c| c / s).collect();
    let value = inner(&zf, &wf) - sigma * inner(&wf, &wf);
    (wf, zf, value)
}

enum PointCheck {
    Ok,
    Fail(Witness),
    TooLarge(usize),
}

fn check_point(m: &LocalModel, pt: &GraphPoint, sigma: f64) -> PointCheck {
    let n = m.n;
    let union = limiting_of_cones(&m.cones).map(2 * n, normal_to_pair(n));
    let sq = exact::from_f64(sigma);
    let mut large = None;
    for cone in union.cones() {
        match form_minimum(cone, n, &sq) {
            FormMin::Nonnegative => {}
            FormMin::TooLarge(k) => large = Some(k),
            FormMin::Negative { w, z, .. } => {
                let (w, z, value) = normalize_witness(cone, &w, &z, sigma);
                let slack = if m.exact { 0.0 } else { 1e-9 };
                if value < -slack {
                    return PointCheck::Fail(Witness::Coderivative {
                        u: pt.x.clone(),
                        v: pt.v.clone(),
                        w,
                        z,
                        sigma,
                        value,
                    });
                }
            }
        }
    }
    match large {
        Some(k) => PointCheck::TooLarge(k),
        None => PointCheck::Ok,
    }
}

/// Graph points covering every stratum of the graph inside the box.
///
/// Polyhedral graphs get one point per relatively open face of every piece
/// and of every pairwise intersection of pieces, chosen close to the box
/// center; other graphs fall back to graph samples.
pub fn strata_points(op: &Operator, bx: &GraphBox, density: usize) -> Result<(Vec<GraphPoint>, bool)> {
    let n = op.dim();
    let center = bx.center();
    let cq = exact::vec_from_f64(&center.stacked());
    let mut pts: Vec<GraphPoint> = Vec::new();
    let exact_strata = if let Some((g, regions)) = op.local_graph() {
        let pieces = g.pieces();
        let mut sets: Vec<Polyhedron> = pieces.to_vec();
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let c = pieces[i].intersect(&pieces[j]);
                if !c.is_empty() {
                    sets.push(c);
                }
            }
        }
        let mut reps: Vec<QVec> = Vec::new();
        for s in &sets {
            for f in s.faces() {
                let Some(near) = f.poly.nearest_point(&cq) else { continue };
                let shift = exact::scale(&exact::ratio(1, 64), &exact::sub(&f.relint, &near));
                reps.push(exact::add(&near, &shift));
            }
        }
        reps.sort_by(|a, b| exact::cmp_vec(a, b));
        reps.dedup();
        for r in reps {
            let p = GraphPoint::from_stacked(&exact::vec_to_f64(&r));
            if bx.contains(&p, 0.0) && regions.iter().all(|b| b.contains(&p, 0.0)) {
                pts.push(p);
            }
        }
        true
    } else {
        pts = sample_graph(op, bx, graph_density(density))?.points().to_vec();
        false
    };
    if op.contains_pair(&center.x, &center.v, 0.0).unwrap_or(false) {
        pts.push(center.clone());
    }
    let dist = |p: &GraphPoint| euclid(&p.stacked().iter().zip(center.stacked()).map(|(a, b)| a - b).collect::<Vec<_>>());
    pts.sort_by(|a, b| {
        dist(a)
            .total_cmp(&dist(b))
            .then_with(|| cmp_f64_vec(&b.stacked(), &a.stacked()))
    });
    pts.dedup();
    debug_assert!(pts.iter().all(|p| p.dim() == n));
    Ok((pts, exact_strata))
}

/// Checks `<z, w> >= σ|w|^2` for all `z ∈ D*T(u, v)(w)` over graph points
/// in the box. Points are visited by distance to the box center and the
/// first violation is reported.
pub fn psd_criterion(op: &Operator, bx: &GraphBox, sigma: f64, density: usize) -> Result<Verdict> {
    if !bx.norm.is_euclidean() {
        return Err(MonoError::Unsupported("coderivative criteria need the Euclidean norm".into()));
    }
    let (pts, exact_strata) = strata_points(op, bx, density)?;
    let mut res = Resolution::new(0.0).density(density).samples(pts.len());
    let mut large = None;
    let mut all_exact = exact_strata;
    for p in &pts {
        let m = match local_model(op, p) {
            Ok(m) => m,
            Err(MonoError::PointNotInSet) => continue,
            Err(e) => return Err(e),
        };
        all_exact &= m.exact;
        match check_point(&m, p, sigma) {
            PointCheck::Ok => {}
            PointCheck::TooLarge(k) => {
                large.get_or_insert(k);
            }
            PointCheck::Fail(w) => {
                res.exact = all_exact;
                return Ok(Verdict::fail(w, res));
            }
        }
    }
    res.exact = all_exact;
    Ok(match large {
        Some(k) => Verdict::inconclusive(res, format!("cone with {k} generators exceeds the exact form check")),
        None => Verdict::pass(res),
    })
}

/// Largest `σ` for which `psd_criterion` passes, located by bisection to
/// `1e-9`; infinite when the coderivative never sees a nonzero `w`.
pub fn supremal_psd_sigma(op: &Operator, bx: &GraphBox, density: usize) -> Result<f64> {
    let passes = |s: f64| -> Result<bool> { Ok(psd_criterion(op, bx, s, density)?.is_pass()) };
    let (mut lo, mut hi);
    if passes(0.0)? {
        lo = 0.0;
        hi = 1.0;
        while passes(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Ok(f64::INFINITY);
            }
        }
    } else {
        hi = 0.0;
        lo = -1.0;
        while !passes(lo)? {
            hi = lo;
            lo *= 2.0;
            if lo < -1e6 {
                return Ok(f64::NEG_INFINITY);
            }
        }
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn hypo_part(op: &Operator, b: &GraphBox, density: usize) -> Result<Verdict> {
    let g = sample_graph(op, b, graph_density(density))?;
    let res = Resolution::new(b.default_tol()).density(density).samples(g.len());
    match hypo_modulus(&g) {
        Ok(r) => {
            let mut v = Verdict::pass(res);
            v.moduli.r_hat = Some(r);
            Ok(v)
        }
        Err(MonoError::Unbounded { pairs }) => {
            let (a, c) = pairs[0].clone();
            let dv: Vec<f64> = a.v.iter().zip(&c.v).map(|(p, q)| p - q).collect();
            let dx: Vec<f64> = a.x.iter().zip(&c.x).map(|(p, q)| p - q).collect();
            let value = inner(&dv, &dx);
            Ok(Verdict::fail(Witness::Pair { a, b: c, value }, res).with_note("hypomonotonicity modulus grows under refinement"))
        }
        Err(e) => Err(e),
    }
}

/// Local maximal monotonicity (σ = 0) or local σ-strong maximal
/// monotonicity (σ > 0) from a finite hypomonotonicity modulus together with
/// the coderivative criterion, over the nested box scales.
pub fn local_max_via_coderivative(
    op: &Operator,
    pt: &GraphPoint,
    bx: &GraphBox,
    density: usize,
    sigma: f64,
) -> Result<Verdict> {
    let tol = bx.default_tol();
    if !op.contains_pair(&pt.x, &pt.v, tol)? {
        return Err(MonoError::PointNotInSet);
    }
    let mut first_fail: Option<Verdict> = None;
    let mut inconclusive: Option<Verdict> = None;
    for &level in &LEVELS {
        let b = bx.scaled(level);
        let hypo = hypo_part(op, &b, density)?;
        let psd = psd_criterion(op, &b, sigma, density)?;
        let status = match (hypo.status, psd.status) {
            (Status::Pass, Status::Pass) => Status::Pass,
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            _ => Status::Inconclusive,
        };
        let witness = if psd.is_fail() { psd.witness.clone() } else { hypo.witness.clone() };
        let mut v = Verdict {
            status,
            witness,
            moduli: hypo.moduli.clone(),
            resolution: psd.resolution.clone(),
            notes: Vec::new(),
            parts: Vec::new(),
        }
        .with_part("hypomonotone", hypo)
        .with_part("psd", psd);
        match status {
            Status::Pass => return Ok(v.with_note(format!("box scale {level}"))),
            Status::Fail => {
                first_fail.get_or_insert(v);
            }
            Status::Inconclusive => {
                v = v.with_note(format!("box scale {level}"));
                inconclusive.get_or_insert(v);
            }
        }
    }
    Ok(inconclusive.or(first_fail).expect("at least one scale").with_note(format!("box scales tried: {LEVELS:?}")))
}

/// Re-derives a coderivative witness: the pair must lie in the limiting
/// coderivative at the stored graph point and give the stored value.
pub fn revalidate_coderivative(op: &Operator, w: &Witness) -> Result<bool> {
    let Witness::Coderivative { u, v, w, z, sigma, value } = w else {
        return Ok(false);
    };
    let pt = GraphPoint::new(u.clone(), v.clone())?;
    let union = limiting_coderivative(op, &pt)?;
    let mut pair = exact::vec_from_f64(w);
    pair.extend(exact::vec_from_f64(z));
    let q = inner(z, w) - sigma * inner(w, w);
    Ok(union.contains(&pair) && q < 0.0 && (q - value).abs() <= 1e-9 * (1.0 + value.abs()))
}
