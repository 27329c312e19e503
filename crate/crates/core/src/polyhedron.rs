//! Exact H-/V-representation polyhedra in low dimension.
//!
//! Conversion between the two representations is done by brute-force basis
//! enumeration, which is complete and exact for the desk-scale dimensions
//! (ambient dimension at most six) this crate works in.

use crate::exact::{self, QVec, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

/// `a . z <= b` (inequality) or `a . z = b` (equality).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: QVec,
    pub b: Rat,
}

impl Constraint {
    pub fn new(a: QVec, b: Rat) -> Self {
        Self { a, b }
    }

    /// Positive rescaling with unit max-norm normal; equalities also get a
    /// positive leading coefficient.
    pub fn normalized(&self, equality: bool) -> Self {
        let m = self
            .a
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rat::zero);
        if m.is_zero() {
            return self.clone();
        }
        let mut c = Rat::one() / m;
        if equality && self.a.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            c = -c;
        }
        Self {
            a: exact::scale(&c, &self.a),
            b: c * &self.b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    dim: usize,
    ineqs: Vec<Constraint>,
    eqs: Vec<Constraint>,
}

/// Minkowski-Weyl description: conv(points) + cone(rays) + span(lineality).
/// Points and rays are orthogonal to the lineality space, rays are scaled to
/// unit max-norm, and every list is sorted, so equal polyhedra have equal
/// `VRep`s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub dim: usize,
    pub points: Vec<QVec>,
    pub rays: Vec<QVec>,
    pub lineality: Vec<QVec>,
}

#[derive(Clone, Debug)]
pub struct Face {
    /// Indices of the inequalities tight on the whole face.
    pub tight: Vec<usize>,
    pub poly: Polyhedron,
    pub relint: QVec,
}

pub(crate) fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn sort_dedup(mut v: Vec<QVec>) -> Vec<QVec> {
    v.sort_by(|a, b| exact::cmp_vec(a, b));
    v.dedup();
    v
}

impl Polyhedron {
    pub fn universe(dim: usize) -> Self {
        Self {
            dim,
            ineqs: Vec::new(),
            eqs: Vec::new(),
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self::universe(dim).with_ineq(exact::zeros(dim), -Rat::one())
    }

    pub fn with_ineq(mut self, a: QVec, b: Rat) -> Self {
        assert_eq!(a.len(), self.dim, "constraint dimension");
        self.ineqs.push(Constraint::new(a, b));
        self
    }

    pub fn with_eq(mut self, a: QVec, b: Rat) -> Self {
        assert_eq!(a.len(), self.dim, "constraint dimension");
        self.eqs.push(Constraint::new(a, b));
        self
    }

    pub fn from_constraints(dim: usize, ineqs: Vec<Constraint>, eqs: Vec<Constraint>) -> Self {
        debug_assert!(ineqs.iter().chain(&eqs).all(|c| c.a.len() == dim));
        Self { dim, ineqs, eqs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Drops duplicate constraints after normalization.
    pub fn deduplicated(&self) -> Polyhedron {
        let mut ineqs: Vec<Constraint> = Vec::new();
        for c in &self.ineqs {
            let n = c.normalized(false);
            if exact::is_zero_vec(&n.a) && !n.b.is_negative() {
                continue;
            }
            if !ineqs.contains(&n) {
                ineqs.push(n);
            }
        }
        let mut eqs: Vec<Constraint> = Vec::new();
        for c in &self.eqs {
            let n = c.normalized(true);
            if exact::is_zero_vec(&n.a) && n.b.is_zero() {
                continue;
            }
            if !eqs.contains(&n) {
                eqs.push(n);
            }
        }
        Polyhedron {
            dim: self.dim,
            ineqs,
            eqs,
        }
    }

    pub fn ineqs(&self) -> &[Constraint] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[Constraint] {
        &self.eqs
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.ineqs.iter().all(|c| exact::dot(&c.a, z) <= c.b)
            && self.eqs.iter().all(|c| exact::dot(&c.a, z) == c.b)
    }

    /// Largest constraint violation at `z` (zero when `z` is feasible).
    pub fn violation_f64(&self, z: &[f64]) -> f64 {
        let af = |c: &Constraint| -> f64 {
            c.a.iter()
                .zip(z)
                .map(|(ai, zi)| exact::to_f64(ai) * zi)
                .sum::<f64>()
                - exact::to_f64(&c.b)
        };
        let mut worst = 0.0f64;
        for c in &self.ineqs {
            worst = worst.max(af(c));
        }
        for c in &self.eqs {
            worst = worst.max(af(c).abs());
        }
        worst
    }

    pub fn contains_f64(&self, z: &[f64], tol: f64) -> bool {
        self.violation_f64(z) <= tol
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        out.ineqs.extend(other.ineqs.iter().cloned());
        out.eqs.extend(other.eqs.iter().cloned());
        out
    }

    /// `{ y : m y + c in self }` where `m` is `dim x k` (row-major).
    pub fn affine_preimage(&self, m: &[QVec], c: &[Rat], k: usize) -> Polyhedron {
        let map = |con: &Constraint| -> Constraint {
            let a: QVec = (0..k)
                .map(|j| {
                    con.a
                        .iter()
                        .zip(m)
                        .fold(Rat::zero(), |acc, (ai, row)| acc + ai * &row[j])
                })
                .collect();
            Constraint::new(a, &con.b - exact::dot(&con.a, c))
        };
        Polyhedron {
            dim: k,
            ineqs: self.ineqs.iter().map(map).collect(),
            eqs: self.eqs.iter().map(map).collect(),
        }
    }

    /// Image under an invertible linear map `z -> m z`.
    pub fn linear_image(&self, m: &[QVec]) -> Option<Polyhedron> {
        let inv = exact::invert(m)?;
        Some(self.affine_preimage(&inv, &exact::zeros(self.dim), self.dim))
    }

    pub fn translate(&self, t: &[Rat]) -> Polyhedron {
        let ineqs = self
            .ineqs
            .iter()
            .map(|c| Constraint::new(c.a.clone(), &c.b + exact::dot(&c.a, t)))
            .collect();
        let eqs = self
            .eqs
            .iter()
            .map(|c| Constraint::new(c.a.clone(), &c.b + exact::dot(&c.a, t)))
            .collect();
        Polyhedron {
            dim: self.dim,
            ineqs,
            eqs,
        }
    }

    /// Adds `lo_i <= z_i <= hi_i` for every coordinate.
    pub fn clip_bounds(&self, lo: &[Rat], hi: &[Rat]) -> Polyhedron {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.ineqs
                .push(Constraint::new(exact::unit(self.dim, i), hi[i].clone()));
            out.ineqs
                .push(Constraint::new(exact::neg(&exact::unit(self.dim, i)), -lo[i].clone()));
        }
        out
    }

    pub fn active_set(&self, z: &[Rat]) -> Vec<usize> {
        self.ineqs
            .iter()
            .enumerate()
            .filter(|(_, c)| exact::dot(&c.a, z) == c.b)
            .map(|(i, _)| i)
            .collect()
    }

    /// Tangent cone at a member point, as a homogeneous polyhedron.
    pub fn tangent_cone(&self, z: &[Rat]) -> Polyhedron {
        debug_assert!(self.contains(z));
        let ineqs = self
            .active_set(z)
            .into_iter()
            .map(|i| Constraint::new(self.ineqs[i].a.clone(), Rat::zero()))
            .collect();
        let eqs = self
            .eqs
            .iter()
            .map(|c| Constraint::new(c.a.clone(), Rat::zero()))
            .collect();
        Polyhedron {
            dim: self.dim,
            ineqs,
            eqs,
        }
    }

    /// Polyhedron with the listed inequalities turned into equalities.
    pub fn with_tight(&self, tight: &[usize]) -> Polyhedron {
        let mut out = self.clone();
        for &i in tight {
            out.eqs.push(self.ineqs[i].clone());
        }
        out
    }

    pub fn vrep(&self) -> Option<VRep> {
        self.deduplicated().vrep_raw()
    }

    fn vrep_raw(&self) -> Option<VRep> {
        let d = self.dim;
        let rows: Vec<QVec> = self
            .ineqs
            .iter()
            .chain(&self.eqs)
            .map(|c| c.a.clone())
            .collect();
        let lineality = exact::canonical_span(&exact::nullspace(&rows, d), d);
        let mut eq_rows: Vec<QVec> = self.eqs.iter().map(|c| c.a.clone()).collect();
        let mut eq_rhs: Vec<Rat> = self.eqs.iter().map(|c| c.b.clone()).collect();
        for l in &lineality {
            eq_rows.push(l.clone());
            eq_rhs.push(Rat::zero());
        }
        exact::solve_affine(&eq_rows, &eq_rhs, d)?;
        let re = exact::rank(&eq_rows, d);
        let k = d - re;
        let m = self.ineqs.len();
        let feasible = |z: &QVec| self.ineqs.iter().all(|c| exact::dot(&c.a, z) <= c.b);

        let mut points = Vec::new();
        for s in combinations(m, k) {
            let mut a = eq_rows.clone();
            let mut b = eq_rhs.clone();
            for &i in &s {
                a.push(self.ineqs[i].a.clone());
                b.push(self.ineqs[i].b.clone());
            }
            if let Some(z) = exact::solve_unique(&a, &b, d) {
                if feasible(&z) {
                    points.push(z);
                }
            }
        }
        if points.is_empty() {
            return None;
        }

        let mut rays = Vec::new();
        if k >= 1 {
            for s in combinations(m, k - 1) {
                let mut a = eq_rows.clone();
                for &i in &s {
                    a.push(self.ineqs[i].a.clone());
                }
                let ns = exact::nullspace(&a, d);
                if ns.len() != 1 {
                    continue;
                }
                let r = &ns[0];
                let dir_ok = |r: &QVec| {
                    self.ineqs
                        .iter()
                        .all(|c| !exact::dot(&c.a, r).is_positive())
                };
                if dir_ok(r) {
                    rays.push(exact::normalize_direction(r));
                } else {
                    let nr = exact::neg(r);
                    if dir_ok(&nr) {
                        rays.push(exact::normalize_direction(&nr));
                    }
                }
            }
        }
        Some(VRep {
            dim: d,
            points: sort_dedup(points),
            rays: sort_dedup(rays),
            lineality,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vrep().is_none()
    }

    pub fn relint_point(&self) -> Option<QVec> {
        self.vrep().map(|v| v.relint_point())
    }

    /// Faces, each with the set of inequalities tight on it and a relative
    /// interior point; the polyhedron itself comes first.
    pub fn faces(&self) -> Vec<Face> {
        let mut out: Vec<Face> = Vec::new();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let Some(c) = self.relint_point() else {
            return out;
        };
        let tight = self.active_set(&c);
        seen.insert(tight.clone());
        out.push(Face {
            poly: self.with_tight(&tight),
            tight,
            relint: c,
        });
        let mut head = 0;
        while head < out.len() {
            let base = out[head].tight.clone();
            head += 1;
            for i in 0..self.ineqs.len() {
                if base.contains(&i) {
                    continue;
                }
                let mut t = base.clone();
                t.push(i);
                let f = self.with_tight(&t);
                if let Some(c) = f.relint_point() {
                    let tight = self.active_set(&c);
                    if seen.insert(tight.clone()) {
                        out.push(Face {
                            poly: self.with_tight(&tight),
                            tight,
                            relint: c,
                        });
                    }
                }
            }
        }
        out
    }

    /// Euclidean nearest point, found by projecting onto the affine hull of
    /// every face and keeping the closest feasible candidate.
    pub fn nearest_point(&self, z: &[Rat]) -> Option<QVec> {
        let mut best: Option<(Rat, QVec)> = None;
        for f in self.faces() {
            let rows: Vec<QVec> = f.poly.eqs.iter().map(|c| c.a.clone()).collect();
            let rhs: Vec<Rat> = f.poly.eqs.iter().map(|c| c.b.clone()).collect();
            let Some((p, ns)) = exact::solve_affine(&rows, &rhs, self.dim) else {
                continue;
            };
            let u = exact::sub(z, &p);
            let along = exact::sub(&u, &exact::project_out(&u, &ns));
            let cand = exact::add(&p, &along);
            if !f.poly.contains(&cand) {
                continue;
            }
            let d = exact::sub(&cand, z);
            let d2 = exact::dot(&d, &d);
            if best.as_ref().is_none_or(|(b, _)| d2 < *b) {
                best = Some((d2, cand));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Cartesian product `self x other`.
    pub fn product(&self, other: &Polyhedron) -> Polyhedron {
        let (d1, d2) = (self.dim, other.dim);
        let left = |c: &Constraint| {
            let mut a = c.a.clone();
            a.extend(exact::zeros(d2));
            Constraint::new(a, c.b.clone())
        };
        let right = |c: &Constraint| {
            let mut a = exact::zeros(d1);
            a.extend(c.a.iter().cloned());
            Constraint::new(a, c.b.clone())
        };
        Polyhedron {
            dim: d1 + d2,
            ineqs: self.ineqs.iter().map(left).chain(other.ineqs.iter().map(right)).collect(),
            eqs: self.eqs.iter().map(left).chain(other.eqs.iter().map(right)).collect(),
        }
    }

    /// The single point `z`.
    pub fn point(z: &[Rat]) -> Polyhedron {
        let d = z.len();
        Polyhedron {
            dim: d,
            ineqs: Vec::new(),
            eqs: (0..d).map(|i| Constraint::new(exact::unit(d, i), z[i].clone())).collect(),
        }
    }

    /// Coordinate projection onto the listed coordinates, in order.
    pub fn project(&self, keep: &[usize]) -> Polyhedron {
        match self.vrep() {
            None => Polyhedron::empty(keep.len()),
            Some(v) => {
                let pick = |z: &QVec| keep.iter().map(|&i| z[i].clone()).collect::<QVec>();
                let lin: Vec<QVec> = v.lineality.iter().map(pick).collect();
                VRep::from_parts_raw(
                    keep.len(),
                    v.points.iter().map(pick).collect(),
                    v.rays.iter().map(pick).collect(),
                    lin,
                )
                .to_hrep()
            }
        }
    }

    /// Minkowski sum.
    pub fn minkowski_sum(&self, other: &Polyhedron) -> Polyhedron {
        match (self.vrep(), other.vrep()) {
            (Some(a), Some(b)) => {
                let mut pts = Vec::new();
                for p in &a.points {
                    for q in &b.points {
                        pts.push(exact::add(p, q));
                    }
                }
                let mut rays = a.rays.clone();
                rays.extend(b.rays.iter().cloned());
                let mut lin = a.lineality.clone();
                lin.extend(b.lineality.iter().cloned());
                VRep::from_parts_raw(self.dim, pts, rays, lin).to_hrep()
            }
            _ => Polyhedron::empty(self.dim),
        }
    }
}

impl VRep {
    /// Builds a canonical description from arbitrary generators.
    pub fn from_parts(dim: usize, points: Vec<QVec>, rays: Vec<QVec>, lineality: Vec<QVec>) -> VRep {
        VRep::from_parts_raw(dim, points, rays, lineality)
            .to_hrep()
            .vrep()
            .unwrap_or(VRep {
                dim,
                points: Vec::new(),
                rays: Vec::new(),
                lineality: Vec::new(),
            })
    }

    pub(crate) fn from_parts_raw(dim: usize, points: Vec<QVec>, rays: Vec<QVec>, lineality: Vec<QVec>) -> VRep {
        VRep {
            dim,
            points,
            rays,
            lineality,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn relint_point(&self) -> QVec {
        let n = Rat::from_integer(self.points.len().into());
        let mut c = exact::zeros(self.dim);
        for p in &self.points {
            c = exact::add(&c, p);
        }
        c = exact::scale(&(Rat::one() / n), &c);
        for r in &self.rays {
            c = exact::add(&c, r);
        }
        c
    }

    /// Affine dimension.
    pub fn affine_dim(&self) -> usize {
        let mut dirs: Vec<QVec> = Vec::new();
        if let Some(p0) = self.points.first() {
            for p in &self.points[1..] {
                dirs.push(exact::sub(p, p0));
            }
        }
        dirs.extend(self.rays.iter().cloned());
        dirs.extend(self.lineality.iter().cloned());
        exact::rank(&dirs, self.dim)
    }

    /// Irredundant inequality description via the polar cone of the
    /// homogenization.
    pub fn to_hrep(&self) -> Polyhedron {
        let d = self.dim;
        if self.points.is_empty() {
            return Polyhedron::empty(d);
        }
        // (h, beta) with h.p - beta <= 0, h.r <= 0, h.l = 0.
        let mut polar = Polyhedron::universe(d + 1);
        for p in &self.points {
            let mut a = p.clone();
            a.push(-Rat::one());
            polar = polar.with_ineq(a, Rat::zero());
        }
        for r in &self.rays {
            let mut a = r.clone();
            a.push(Rat::zero());
            polar = polar.with_ineq(a, Rat::zero());
        }
        for l in &self.lineality {
            let mut a = l.clone();
            a.push(Rat::zero());
            polar = polar.with_eq(a, Rat::zero());
        }
        let pv = polar
            .vrep()
            .expect("polar cone always contains the origin");
        let mut out = Polyhedron::universe(d);
        for g in &pv.rays {
            let h = g[..d].to_vec();
            if exact::is_zero_vec(&h) {
                continue;
            }
            out = out.with_ineq(h, g[d].clone());
        }
        for g in &pv.lineality {
            let h = g[..d].to_vec();
            if exact::is_zero_vec(&h) {
                // 0 = beta with beta free would make the set empty; cannot
                // happen for a nonempty generator set.
                continue;
            }
            out = out.with_eq(h, g[d].clone());
        }
        out
    }

    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| exact::vec_to_f64(p)).collect()
    }
}
