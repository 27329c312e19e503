//! Solvers for `target ∈ κ J(x) + λ T(x)` and the localization probes built
//! on them: the local Minty probe, the inverse probe and the transvected
//! resolvent `(T + σI)^(-1)`.

use crate::error::{check_dim, MonoError, Result};
use crate::exact::{self, QVec};
use crate::monocheck::{graph_density, monotone_witness_tol, strong_modulus, LEVELS};
use crate::normgeom::{duality_map, euclid, GraphPoint, NormSpec};
use crate::opmodel::{cmp_f64_vec, sample_graph, Composite, ConvexSet, GraphBox, Operator};
use crate::verdict::{Resolution, Status, Verdict, Witness};
use serde::{Deserialize, Serialize};

/// All solutions `(x, v)` of the inclusion inside a box.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub points: Vec<GraphPoint>,
    /// The solutions form a continuum; `points` holds representatives.
    pub continuum: bool,
    /// Found by exact per-piece solving.
    pub exact: bool,
}

impl SolutionSet {
    pub fn xs(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    pub fn is_single(&self) -> bool {
        !self.continuum && self.points.len() == 1
    }
}

/// All `x` in the primal ball of `bx` with `y_star ∈ J(x) + λ T(x)`, each with
/// its `T`-value inside the dual ball.
pub fn resolvent_solve(op: &Operator, lambda: f64, y_star: &[f64], spec: &NormSpec, bx: &GraphBox) -> Result<SolutionSet> {
    if !(lambda > 0.0) {
        return Err(MonoError::InvalidInput("lambda must be positive".into()));
    }
    solve_inclusion(op, 1.0, lambda, y_star, spec, bx, bx.default_tol())
}

/// Solves `target ∈ κ J(x) + λ v`, `v ∈ T(x)`, `(x, v)` in `bx`.
pub fn solve_inclusion(
    op: &Operator,
    kappa: f64,
    lambda: f64,
    target: &[f64],
    spec: &NormSpec,
    bx: &GraphBox,
    tol: f64,
) -> Result<SolutionSet> {
    let n = op.dim();
    check_dim(n, target.len())?;
    check_dim(n, bx.dim())?;
    spec.check(n)?;
    if let Some((g, regions)) = op.local_graph() {
        if spec.is_hilbertian() {
            return Ok(solve_polyhedral(&g, &regions, kappa, lambda, target, spec, bx));
        }
    }
    if let Some(view) = smooth_view(op) {
        return solve_smooth(&view, kappa, lambda, target, spec, bx, tol);
    }
    match op {
        Operator::NormalCone(nc) if *nc.set() == ConvexSet::Parabola && spec.is_euclidean() => {
            Ok(solve_parabola(kappa, lambda, target, bx, tol))
        }
        Operator::Sampled(s) => {
            let mut pts = Vec::new();
            for p in s.points() {
                let j = duality_map(&p.x, spec)?;
                let r: Vec<f64> = (0..n).map(|i| kappa * j[i] + lambda * p.v[i] - target[i]).collect();
                if euclid(&r) <= tol && bx.contains(p, 0.0) {
                    pts.push(p.clone());
                }
            }
            Ok(SolutionSet {
                points: pts,
                continuum: false,
                exact: true,
            })
        }
        _ => solve_by_grid(op, kappa, lambda, target, spec, bx, tol),
    }
}

fn solve_polyhedral(
    g: &crate::opmodel::PolyGraph,
    regions: &[GraphBox],
    kappa: f64,
    lambda: f64,
    target: &[f64],
    spec: &NormSpec,
    bx: &GraphBox,
) -> SolutionSet {
    let n = g.n();
    let lam = exact::from_f64(lambda);
    let kap = exact::from_f64(kappa);
    let tq = exact::vec_from_f64(target);
    // (x, v) = (x, (target - κ W x) / λ)
    let m: Vec<QVec> = (0..2 * n)
        .map(|i| {
            if i < n {
                exact::unit(n, i)
            } else {
                let w = exact::from_f64(spec.weights()[i - n]);
                exact::scale(&(-(&kap * w) / &lam), &exact::unit(n, i - n))
            }
        })
        .collect();
    let mut c = exact::zeros(n);
    c.extend(tq.iter().map(|t| t / &lam));
    let value_of = |x: &QVec| -> QVec {
        (0..n)
            .map(|i| {
                let w = exact::from_f64(spec.weights()[i]);
                (&tq[i] - &kap * w * &x[i]) / &lam
            })
            .collect()
    };
    let (xl, xh) = bx.x_cube();
    let (xl, xh) = (exact::vec_from_f64(&xl), exact::vec_from_f64(&xh));
    let admissible = |x: &QVec| -> Option<GraphPoint> {
        let p = GraphPoint {
            x: exact::vec_to_f64(x),
            v: exact::vec_to_f64(&value_of(x)),
        };
        (bx.contains(&p, 0.0) && regions.iter().all(|r| r.contains(&p, 0.0))).then_some(p)
    };
    let mut found: Vec<QVec> = Vec::new();
    let mut continuum = false;
    for piece in g.pieces() {
        let s = piece.affine_preimage(&m, &c, n).clip_bounds(&xl, &xh);
        let Some(vr) = s.vrep() else {
            continue;
        };
        if vr.affine_dim() == 0 {
            if admissible(&vr.points[0]).is_some() {
                found.push(vr.points[0].clone());
            }
            continue;
        }
        let mut cands: Vec<QVec> = vr.points.clone();
        cands.push(vr.relint_point());
        for i in 0..vr.points.len() {
            for j in (i + 1)..vr.points.len() {
                let mid = exact::scale(&exact::ratio(1, 2), &exact::add(&vr.points[i], &vr.points[j]));
                cands.push(mid);
            }
        }
        let inside: Vec<QVec> = cands.into_iter().filter(|x| admissible(x).is_some()).collect();
        let mut distinct = inside.clone();
        distinct.sort_by(|a, b| exact::cmp_vec(a, b));
        distinct.dedup();
        if distinct.len() >= 2 {
            continuum = true;
        }
        found.extend(distinct);
    }
    found.sort_by(|a, b| exact::cmp_vec(a, b));
    found.dedup();
    let points: Vec<GraphPoint> = found.iter().filter_map(admissible).collect();
    SolutionSet {
        continuum,
        points,
        exact: true,
    }
}

/// A single-valued smooth description of a composite operator.
struct SmoothView<'a> {
    parts: Vec<(f64, &'a crate::opmodel::SmoothMap)>,
    shift: Vec<(f64, NormSpec)>,
    regions: Vec<GraphBox>,
}

fn smooth_view(op: &Operator) -> Option<SmoothView<'_>> {
    match op {
        Operator::Smooth(s) => Some(SmoothView {
            parts: vec![(1.0, s)],
            shift: Vec::new(),
            regions: Vec::new(),
        }),
        Operator::Composite(c) => match c.kind() {
            Composite::Sum(a, b) => {
                let (mut va, vb) = (smooth_view(a)?, smooth_view(b)?);
                va.parts.extend(vb.parts);
                va.shift.extend(vb.shift);
                va.regions.extend(vb.regions);
                (va.regions.is_empty()).then_some(va)
            }
            Composite::Scale { op, c } => {
                let mut v = smooth_view(op)?;
                if !v.regions.is_empty() {
                    return None;
                }
                for p in &mut v.parts {
                    p.0 *= c;
                }
                for s in &mut v.shift {
                    s.0 *= c;
                }
                Some(v)
            }
            Composite::ShiftJ { op, sigma, spec } => {
                let mut v = smooth_view(op)?;
                if !v.regions.is_empty() {
                    return None;
                }
                v.shift.push((*sigma, spec.clone()));
                Some(v)
            }
            Composite::Localize { op, region } => {
                let mut v = smooth_view(op)?;
                v.regions.push(region.clone());
                Some(v)
            }
            Composite::Inverse(_) => None,
        },
        _ => None,
    }
}

impl SmoothView<'_> {
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut out = vec![0.0; n];
        for (c, s) in &self.parts {
            for (o, f) in out.iter_mut().zip(s.apply(x)) {
                *o += c * f;
            }
        }
        for (sig, spec) in &self.shift {
            let j = duality_map(x, spec).expect("dimension checked");
            for (o, f) in out.iter_mut().zip(j) {
                *o += sig * f;
            }
        }
        out
    }
}

fn fd_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; n];
    for j in 0..n {
        let h = 1e-7 * (1.0 + x[j].abs());
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[j] += h;
        b[j] -= h;
        let (fa, fb) = (f(&a), f(&b));
        for i in 0..n {
            jac[i][j] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    jac
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting.
fn lin_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn solve_smooth(
    view: &SmoothView<'_>,
    kappa: f64,
    lambda: f64,
    target: &[f64],
    spec: &NormSpec,
    bx: &GraphBox,
    tol: f64,
) -> Result<SolutionSet> {
    let g = |x: &[f64]| -> Vec<f64> {
        let j = duality_map(x, spec).expect("dimension checked");
        let f = view.eval(x);
        (0..x.len()).map(|i| kappa * j[i] + lambda * f[i] - target[i]).collect()
    };
    let scale = 1.0 + euclid(target);
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut starts = bx.x_grid(5);
    starts.sort_by(|a, b| cmp_f64_vec(a, b));
    for x0 in starts {
        let mut x = x0;
        for _ in 0..100 {
            let r = g(&x);
            let nr = euclid(&r);
            if nr <= 1e-13 * scale {
                break;
            }
            let jac = fd_jacobian(&g, &x);
            let Some(step) = lin_solve(jac, r.iter().map(|v| -v).collect()) else {
                break;
            };
            let mut t = 1.0;
            loop {
                let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + t * s).collect();
                if euclid(&g(&cand)) < nr || t < 1e-6 {
                    x = cand;
                    break;
                }
                t *= 0.5;
            }
        }
        if euclid(&g(&x)) <= tol.max(1e-10) * scale && !roots.iter().any(|r| euclid(&diff(r, &x)) <= 1e-7 * scale) {
            roots.push(x);
        }
    }
    let points: Vec<GraphPoint> = roots
        .into_iter()
        .map(|x| GraphPoint { v: view.eval(&x), x })
        .filter(|p| bx.contains(p, 0.0) && view.regions.iter().all(|r| r.contains(p, 0.0)))
        .collect();
    let mut points = points;
    points.sort_by(|a, b| cmp_f64_vec(&a.x, &b.x));
    Ok(SolutionSet {
        points,
        continuum: false,
        exact: false,
    })
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

/// Euclidean projection onto `{ (a, b) : b >= a^2 }`.
pub fn project_parabola(y: &[f64]) -> Vec<f64> {
    if y[1] >= y[0] * y[0] {
        return y.to_vec();
    }
    // Stationarity on the boundary: 2a^3 + (1 - 2 y2) a - y1 = 0.
    let f = |a: f64| 2.0 * a * a * a + (1.0 - 2.0 * y[1]) * a - y[0];
    let r = 2.0 + y[0].abs() + y[1].abs();
    let steps = 4000;
    let mut best: Option<(f64, f64)> = None;
    let mut prev = -r;
    for k in 1..=steps {
        let cur = -r + 2.0 * r * k as f64 / steps as f64;
        if f(prev) == 0.0 || f(prev).signum() != f(cur).signum() {
            let (mut lo, mut hi) = (prev, cur);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo).signum() == f(mid).signum() && f(mid) != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let a = 0.5 * (lo + hi);
            let d = (a - y[0]).powi(2) + (a * a - y[1]).powi(2);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, a));
            }
        }
        prev = cur;
    }
    let a = best.map(|b| b.1).unwrap_or(y[0]);
    vec![a, a * a]
}

fn solve_parabola(kappa: f64, lambda: f64, target: &[f64], bx: &GraphBox, tol: f64) -> SolutionSet {
    let mut points = Vec::new();
    let mut continuum = false;
    if kappa > 0.0 {
        let y: Vec<f64> = target.iter().map(|t| t / kappa).collect();
        let x = project_parabola(&y);
        let v: Vec<f64> = (0..2).map(|i| (target[i] - kappa * x[i]) / lambda).collect();
        points.push(GraphPoint { x, v });
    } else if euclid(target) <= tol {
        continuum = true;
        for x in bx.x_grid(5) {
            if x[1] > x[0] * x[0] {
                points.push(GraphPoint { x, v: vec![0.0, 0.0] });
            }
        }
    } else if target[1] < 0.0 {
        let t = -target[1] / lambda;
        let a = target[0] / (2.0 * lambda * t);
        points.push(GraphPoint {
            x: vec![a, a * a],
            v: target.iter().map(|y| y / lambda).collect(),
        });
    }
    points.retain(|p| bx.contains(p, 0.0));
    let continuum = continuum && points.len() >= 2;
    SolutionSet {
        points,
        continuum,
        exact: false,
    }
}

/// Residual-based grid search; refuses to answer when the residual cannot be
/// driven below the tolerance on the finest grid.
fn solve_by_grid(
    op: &Operator,
    kappa: f64,
    lambda: f64,
    target: &[f64],
    spec: &NormSpec,
    bx: &GraphBox,
    tol: f64,
) -> Result<SolutionSet> {
    let mut spacing = f64::INFINITY;
    for density in [9usize, 17, 33] {
        spacing = 2.0 * bx.x_radius / (density - 1) as f64;
        let mut hits = Vec::new();
        for x in bx.x_grid(density) {
            let j = duality_map(&x, spec)?;
            let want: Vec<f64> = (0..x.len()).map(|i| (target[i] - kappa * j[i]) / lambda).collect();
            let vs = op.value_at(&x, tol)?;
            if vs.contains(&want, tol) {
                hits.push(GraphPoint { x, v: want });
            }
        }
        hits.retain(|p| bx.contains(p, 0.0));
        if hits.len() == 1 {
            return Ok(SolutionSet {
                points: hits,
                continuum: false,
                exact: false,
            });
        }
    }
    Err(MonoError::SolverLimit { finest: spacing })
}

/// One probe query and what the solver found for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeQuery {
    pub y: Vec<f64>,
    pub solutions: Vec<Vec<f64>>,
    pub continuum: bool,
}

impl ProbeQuery {
    pub fn is_single(&self) -> bool {
        !self.continuum && self.solutions.len() == 1
    }
}

/// Record of a localization probe of `(κJ + λT)^(-1)` around
/// `(κJ(x̄) + λv̄, x̄)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationProbe {
    pub image_center: Vec<f64>,
    pub primal_center: Vec<f64>,
    pub kappa: f64,
    pub lambda: f64,
    /// Image radii tried at the reported box scale.
    pub radii: Vec<f64>,
    /// Box scale factor the record belongs to.
    pub scale: f64,
    pub tol: f64,
    pub queries: Vec<ProbeQuery>,
    pub single_valued: bool,
    pub full_domain: bool,
    pub lipschitz: Option<f64>,
    pub spec: NormSpec,
}

/// `max |x1 - x2| / |y1 - y2|_*` over pairs of single-solution queries.
pub fn localization_lipschitz(probe: &LocalizationProbe) -> Result<f64> {
    let solved: Vec<&ProbeQuery> = probe.queries.iter().filter(|q| q.is_single()).collect();
    let mut best: Option<f64> = None;
    for i in 0..solved.len() {
        for j in (i + 1)..solved.len() {
            let dy = probe.spec.dual_dist(&solved[i].y, &solved[j].y);
            if dy <= 0.0 {
                continue;
            }
            let dx = probe.spec.dist(&solved[i].solutions[0], &solved[j].solutions[0]);
            let r = dx / dy;
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best.ok_or_else(|| MonoError::Degenerate("fewer than two distinct solved queries".into()))
}

#[derive(Clone, Copy, Debug)]
struct ProbeKind {
    kappa: f64,
    lambda: f64,
    check_monotone: bool,
}

enum Outcome {
    Pass,
    Bad(ProbeQuery),
    Boundary,
    Limit(f64),
}

fn image_grid(center: &[f64], rho: f64, density: usize) -> Vec<Vec<f64>> {
    let lo: Vec<f64> = center.iter().map(|c| c - rho).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + rho).collect();
    let mut ys = crate::opmodel::grid(&lo, &hi, density);
    ys.push(center.to_vec());
    ys.retain(|y| euclid(&diff(y, center)) <= rho * (1.0 + 1e-12));
    ys.sort_by(|a, b| cmp_f64_vec(a, b));
    ys.dedup();
    ys
}

/// Runs the probe at one box scale; returns the verdict for that scale and
/// the probe record.
fn probe_level(
    op: &Operator,
    pt: &GraphPoint,
    kind: ProbeKind,
    spec: &NormSpec,
    b: &GraphBox,
    density: usize,
    tol: f64,
) -> Result<(Verdict, LocalizationProbe)> {
    let n = pt.x.len();
    let j = duality_map(&pt.x, spec)?;
    let center: Vec<f64> = (0..n).map(|i| kind.kappa * j[i] + kind.lambda * pt.v[i]).collect();
    let rho0 = if kind.kappa > 0.0 {
        0.5 * (kind.kappa * b.x_radius).min(0.5 * kind.lambda * b.v_radius)
    } else {
        0.5 * kind.lambda * b.v_radius
    };
    let radii = vec![rho0, rho0 / 2.0, rho0 / 4.0];
    let mut res = Resolution::new(tol).density(density).radii(radii.clone());
    res.lambdas = vec![kind.lambda];
    let mut probe = LocalizationProbe {
        image_center: center.clone(),
        primal_center: pt.x.clone(),
        kappa: kind.kappa,
        lambda: kind.lambda,
        radii: radii.clone(),
        scale: b.x_radius,
        tol,
        queries: Vec::new(),
        single_valued: true,
        full_domain: true,
        lipschitz: None,
        spec: spec.clone(),
    };
    if kind.check_monotone {
        let g = sample_graph(op, b, graph_density(density))?;
        let mono = monotone_witness_tol(&g, &b.norm, tol);
        if mono.is_fail() {
            return Ok((
                Verdict {
                    resolution: res,
                    ..mono
                }
                .with_note("sampled graph is not monotone"),
                probe,
            ));
        }
    }
    let mut last = Outcome::Boundary;
    let mut exact = true;
    for &rho in &radii {
        let mut queries = Vec::new();
        let mut bad: Vec<ProbeQuery> = Vec::new();
        let mut boundary = false;
        let mut limit = None;
        for y in image_grid(&center, rho, density) {
            match solve_inclusion(op, kind.kappa, kind.lambda, &y, spec, b, tol) {
                Ok(s) => {
                    exact &= s.exact;
                    let q = ProbeQuery {
                        y: y.clone(),
                        solutions: s.xs(),
                        continuum: s.continuum,
                    };
                    if !s.is_single() {
                        bad.push(q.clone());
                    } else if !b.holds_interior(&s.points[0], 1.0 - 1e-9) {
                        boundary = true;
                    }
                    queries.push(q);
                }
                Err(MonoError::SolverLimit { finest }) => limit = Some(finest),
                Err(e) => return Err(e),
            }
        }
        probe.queries = queries;
        probe.single_valued = !probe.queries.iter().any(|q| q.continuum || q.solutions.len() > 1);
        probe.full_domain = !probe.queries.iter().any(|q| q.solutions.is_empty());
        last = if let Some(f) = limit {
            Outcome::Limit(f)
        } else if let Some(q) = bad.into_iter().min_by(|a, b| {
            euclid(&diff(&a.y, &center))
                .total_cmp(&euclid(&diff(&b.y, &center)))
                .then_with(|| cmp_f64_vec(&b.y, &a.y))
        }) {
            Outcome::Bad(q)
        } else if boundary {
            Outcome::Boundary
        } else {
            Outcome::Pass
        };
        if matches!(last, Outcome::Pass) {
            probe.radii = radii.iter().copied().filter(|r| *r >= rho).collect();
            break;
        }
    }
    probe.lipschitz = localization_lipschitz(&probe).ok();
    res.samples = Some(probe.queries.len());
    res.exact = exact;
    let mut v = match last {
        Outcome::Pass => Verdict::pass(res),
        Outcome::Bad(q) => Verdict::fail(
            Witness::Query {
                y: q.y,
                solutions: q.solutions,
                continuum: q.continuum,
            },
            res,
        ),
        Outcome::Boundary => Verdict::inconclusive(res, "solutions reach the boundary of the primal ball"),
        Outcome::Limit(f) => Verdict::inconclusive(res, format!("solver limit at grid spacing {f:e}")),
    };
    v.moduli.ell_hat = probe.lipschitz;
    Ok((v, probe))
}

/// Runs a probe over the nested box scales: PASS at the first passing
/// scale, FAIL when every scale fails (reporting the largest), otherwise
/// INCONCLUSIVE.
fn probe_nested(
    op: &Operator,
    pt: &GraphPoint,
    kind: ProbeKind,
    spec: &NormSpec,
    bx: &GraphBox,
    density: usize,
    tol: Option<f64>,
    extra: &dyn Fn(&GraphBox) -> Result<Option<Verdict>>,
) -> Result<(Verdict, LocalizationProbe)> {
    let tol = tol.unwrap_or_else(|| bx.default_tol());
    if !op.contains_pair(&pt.x, &pt.v, tol)? {
        return Err(MonoError::PointNotInSet);
    }
    let mut first_fail: Option<(Verdict, LocalizationProbe)> = None;
    let mut any_inconclusive: Option<(Verdict, LocalizationProbe)> = None;
    let mut scales = Vec::new();
    for &level in &LEVELS {
        let b = bx.scaled(level);
        scales.push(level);
        let (mut v, probe) = probe_level(op, pt, kind, spec, &b, density, tol)?;
        if v.is_pass() {
            if let Some(x) = extra(&b)? {
                let status = x.status;
                let w = x.witness.clone();
                v = v.with_part("modulus", x.clone());
                v.moduli.sigma_hat = x.moduli.sigma_hat;
                if status != Status::Pass {
                    v.status = status;
                    v.witness = w;
                }
            }
        }
        match v.status {
            Status::Pass => {
                v = v.with_note(format!("box scale {level}"));
                return Ok((v, probe));
            }
            Status::Fail => {
                first_fail.get_or_insert((v, probe));
            }
            Status::Inconclusive => {
                any_inconclusive.get_or_insert((v, probe));
            }
        }
    }
    let (mut v, probe) = match (any_inconclusive, first_fail) {
        (Some(i), _) => i,
        (None, Some(f)) => f,
        (None, None) => unreachable!("every scale yields a status"),
    };
    v = v.with_note(format!("box scales tried: {scales:?}"));
    Ok((v, probe))
}

/// Local Minty probe: single-valued, full-domain localization of
/// `(J + λT)^(-1)` around `(J(x̄) + λv̄, x̄)`, plus monotonicity of the sampled
/// graph.
pub fn minty_local_probe(
    op: &Operator,
    pt: &GraphPoint,
    lambda: f64,
    bx: &GraphBox,
    density: usize,
    tol: Option<f64>,
) -> Result<(Verdict, LocalizationProbe)> {
    if !(lambda > 0.0) {
        return Err(MonoError::InvalidInput("lambda must be positive".into()));
    }
    let kind = ProbeKind {
        kappa: 1.0,
        lambda,
        check_monotone: true,
    };
    probe_nested(op, pt, kind, &bx.norm, bx, density, tol, &|_| Ok(None))
}

pub const DEFAULT_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Minty probe over several `λ`: PASS when all pass, FAIL when any fails.
pub fn minty_sweep(
    op: &Operator,
    pt: &GraphPoint,
    lambdas: &[f64],
    bx: &GraphBox,
    density: usize,
    tol: Option<f64>,
) -> Result<Verdict> {
    let mut parts = Vec::new();
    for &l in lambdas {
        parts.push((l, minty_local_probe(op, pt, l, bx, density, tol)?.0));
    }
    let status = if parts.iter().any(|(_, v)| v.is_fail()) {
        Status::Fail
    } else if parts.iter().all(|(_, v)| v.is_pass()) {
        Status::Pass
    } else {
        Status::Inconclusive
    };
    let lead = parts
        .iter()
        .find(|(_, v)| v.status == status)
        .map(|(_, v)| v.clone())
        .expect("status taken from a part");
    let mut out = Verdict {
        status,
        witness: lead.witness.clone(),
        moduli: lead.moduli.clone(),
        resolution: lead.resolution.clone(),
        notes: Vec::new(),
        parts: Vec::new(),
    };
    out.resolution.lambdas = lambdas.to_vec();
    for (l, v) in parts {
        out = out.with_part(format!("lambda={l}"), v);
    }
    Ok(out)
}

/// Single-valued localization of `T^(-1)` around `(v̄, x̄)` combined with a
/// strong-monotonicity modulus of at least `min_modulus` (or positive when
/// not given) on the sampled graph of the same box.
pub fn strong_inverse_probe(
    op: &Operator,
    pt: &GraphPoint,
    bx: &GraphBox,
    density: usize,
    min_modulus: Option<f64>,
    tol: Option<f64>,
) -> Result<Verdict> {
    let kind = ProbeKind {
        kappa: 0.0,
        lambda: 1.0,
        check_monotone: false,
    };
    let t = tol.unwrap_or_else(|| bx.default_tol());
    let modulus = |b: &GraphBox| -> Result<Option<Verdict>> {
        let g = sample_graph(op, b, graph_density(density))?;
        let res = Resolution::new(t).density(density).samples(g.len());
        let est = match strong_modulus(&g, &b.norm) {
            Ok(e) => e,
            Err(MonoError::Degenerate(_)) => {
                return Ok(Some(Verdict::pass(res).with_note("no pairs with distinct x: modulus condition is vacuous")));
            }
            Err(e) => return Err(e),
        };
        let required = min_modulus.unwrap_or(0.0);
        let ok = est.value > t && est.value >= required - t;
        let mut v = if ok {
            Verdict::pass(res)
        } else {
            Verdict::fail(
                Witness::Modulus {
                    a: est.pair.0.clone(),
                    b: est.pair.1.clone(),
                    ratio: est.value,
                    required: required.max(t),
                },
                res,
            )
        };
        v.moduli.sigma_hat = Some(est.value);
        Ok(Some(v))
    };
    let (v, _) = probe_nested(op, pt, kind, &bx.norm, bx, density, tol, &modulus)?;
    Ok(v)
}

/// Probe of `R_σ = (T + σI)^(-1)` around `(v̄ + σx̄, x̄)` (Euclidean), the
/// image of the graph under the transvection.
pub fn transvected_probe(
    op: &Operator,
    pt: &GraphPoint,
    sigma: f64,
    bx: &GraphBox,
    density: usize,
    tol: Option<f64>,
) -> Result<(Verdict, LocalizationProbe)> {
    if !(sigma > 0.0) {
        return Err(MonoError::InvalidInput("sigma must be positive".into()));
    }
    let kind = ProbeKind {
        kappa: sigma,
        lambda: 1.0,
        check_monotone: false,
    };
    let spec = NormSpec::euclidean(op.dim());
    probe_nested(op, pt, kind, &spec, bx, density, tol, &|_| Ok(None))
}

/// Recounts the solutions of a failing query.
pub fn revalidate_query(op: &Operator, w: &Witness, kappa: f64, lambda: f64, spec: &NormSpec, bx: &GraphBox) -> Result<bool> {
    let Witness::Query { y, .. } = w else {
        return Ok(false);
    };
    for &level in &LEVELS {
        let s = solve_inclusion(op, kappa, lambda, y, spec, &bx.scaled(level), bx.default_tol())?;
        if !s.is_single() {
            return Ok(true);
        }
    }
    Ok(false)
}


#[cfg(test)]
mod tests;
