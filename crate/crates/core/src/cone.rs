//! Polyhedral cones and finite unions of them.

use crate::exact::{self, QVec, Rat};
use crate::polyhedron::{Polyhedron, VRep};
use num_traits::Zero;

/// A closed polyhedral cone `cone(generators) + span(lineality)`, kept in
/// canonical form so that equal cones compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCone {
    dim: usize,
    generators: Vec<QVec>,
    lineality: Vec<QVec>,
}

impl PolyCone {
    pub fn from_generators(dim: usize, generators: Vec<QVec>, lineality: Vec<QVec>) -> PolyCone {
        let h = VRep::from_parts_raw(dim, vec![exact::zeros(dim)], generators, lineality).to_hrep();
        PolyCone::from_hrep(&h)
    }

    /// Cone described by homogeneous constraints.
    pub fn from_hrep(h: &Polyhedron) -> PolyCone {
        let dim = h.dim();
        let v = h.vrep().expect("a homogeneous system always contains the origin");
        PolyCone {
            dim,
            generators: v.rays,
            lineality: v.lineality,
        }
    }

    pub fn zero(dim: usize) -> PolyCone {
        PolyCone {
            dim,
            generators: Vec::new(),
            lineality: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> PolyCone {
        PolyCone::from_generators(dim, Vec::new(), (0..dim).map(|i| exact::unit(dim, i)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme rays (pointed part, orthogonal to the lineality space).
    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn hrep(&self) -> Polyhedron {
        VRep::from_parts_raw(
            self.dim,
            vec![exact::zeros(self.dim)],
            self.generators.clone(),
            self.lineality.clone(),
        )
        .to_hrep()
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.hrep().contains(z)
    }

    pub fn contains_cone(&self, other: &PolyCone) -> bool {
        let h = self.hrep();
        other.generators.iter().all(|g| h.contains(g))
            && other
                .lineality
                .iter()
                .all(|l| h.contains(l) && h.contains(&exact::neg(l)))
    }

    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        PolyCone::from_hrep(&self.hrep().intersect(&other.hrep()))
    }

    /// `{ y : <y, c> <= 0 for all c in self }`.
    pub fn polar(&self) -> PolyCone {
        let mut h = Polyhedron::universe(self.dim);
        for g in &self.generators {
            h = h.with_ineq(g.clone(), Rat::zero());
        }
        for l in &self.lineality {
            h = h.with_eq(l.clone(), Rat::zero());
        }
        PolyCone::from_hrep(&h)
    }

    /// Image under a linear map given on generators; the map must send
    /// `dim`-vectors to `out_dim`-vectors.
    pub fn map(&self, out_dim: usize, f: impl Fn(&QVec) -> QVec) -> PolyCone {
        PolyCone::from_generators(
            out_dim,
            self.generators.iter().map(&f).collect(),
            self.lineality.iter().map(&f).collect(),
        )
    }

    /// Generators spanning the cone as a positive hull: extreme rays plus both
    /// signs of every lineality basis vector.
    pub fn positive_spanning_set(&self) -> Vec<QVec> {
        let mut out = self.generators.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(exact::neg(l));
        }
        out
    }

    pub fn linear_dim(&self) -> usize {
        exact::rank(&self.positive_spanning_set(), self.dim)
    }
}

/// A finite union of polyhedral cones with no member contained in another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeUnion {
    dim: usize,
    cones: Vec<PolyCone>,
}

fn cmp_cone(a: &PolyCone, b: &PolyCone) -> std::cmp::Ordering {
    let key = |c: &PolyCone| (c.lineality.len(), c.generators.len());
    key(a).cmp(&key(b)).then_with(|| {
        for (x, y) in a
            .lineality
            .iter()
            .chain(&a.generators)
            .zip(b.lineality.iter().chain(&b.generators))
        {
            let o = exact::cmp_vec(x, y);
            if o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    })
}

impl ConeUnion {
    pub fn new(dim: usize, cones: Vec<PolyCone>) -> ConeUnion {
        let mut kept: Vec<PolyCone> = Vec::new();
        for (i, c) in cones.iter().enumerate() {
            let dominated = cones.iter().enumerate().any(|(j, d)| {
                j != i && d.contains_cone(c) && (!c.contains_cone(d) || j < i)
            });
            if !dominated {
                kept.push(c.clone());
            }
        }
        kept.sort_by(cmp_cone);
        ConeUnion { dim, cones: kept }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cones(&self) -> &[PolyCone] {
        &self.cones
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.contains(z))
    }

    pub fn map(&self, out_dim: usize, f: impl Fn(&QVec) -> QVec) -> ConeUnion {
        ConeUnion::new(out_dim, self.cones.iter().map(|c| c.map(out_dim, &f)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn quadrant_polar_and_union_pruning() {
        let q = PolyCone::from_generators(2, vec![vec![int(1), int(0)], vec![int(0), int(1)]], vec![]);
        let p = q.polar();
        assert!(p.contains(&[int(-1), int(-2)]));
        assert!(!p.contains(&[int(1), int(-2)]));
        let ray = PolyCone::from_generators(2, vec![vec![int(3), int(0)]], vec![]);
        assert!(q.contains_cone(&ray));
        let u = ConeUnion::new(2, vec![ray, q.clone(), q.clone()]);
        assert_eq!(u.cones().len(), 1);
        assert_eq!(PolyCone::full(2).polar(), PolyCone::zero(2));
        assert!(PolyCone::zero(2).is_zero());
    }
}
