use super::*;
use crate::exact::int;
use crate::opmodel::{op_sum, ConvexSet};
use crate::polyhedron::Polyhedron;

fn gp(x: f64, v: f64) -> GraphPoint {
    GraphPoint { x: vec![x], v: vec![v] }
}

fn sg(pts: &[(f64, f64)]) -> SampledGraph {
    SampledGraph::new(1, pts.iter().map(|(x, v)| gp(*x, *v)).collect()).unwrap()
}

fn linear1(slope: i64) -> Operator {
    Operator::polyhedral(1, vec![Polyhedron::universe(2).with_eq(vec![int(slope), int(-1)], int(0))]).unwrap()
}

fn halfline() -> Operator {
    Operator::normal_cone(ConvexSet::Halfspace { a: vec![int(-1)], b: int(0) }).unwrap()
}

#[test]
fn pairwise_monotonicity() {
    let e = NormSpec::euclidean(1);
    assert!(monotone_witness(&sg(&[(0.0, 0.0), (1.0, 1.0)]), &e).is_pass());
    let v = monotone_witness(&sg(&[(0.0, 1.0), (1.0, 0.0)]), &e);
    assert!(v.is_fail());
    match v.witness.unwrap() {
        Witness::Pair { value, .. } => assert_eq!(value, -1.0),
        w => panic!("unexpected witness {w:?}"),
    }
    let b = GraphBox::new(vec![0.0], 1.0, vec![0.0], 1.0).unwrap();
    let g = sample_graph(&halfline(), &b, 9).unwrap();
    assert!(monotone_witness(&g, &e).is_pass());
}

#[test]
fn strong_and_hypo_moduli() {
    let e = NormSpec::euclidean(1);
    let b = GraphBox::new(vec![0.0], 1.0, vec![0.0], 1.0).unwrap();
    let id = sample_graph(&linear1(1), &b, 9).unwrap();
    assert!((strong_modulus(&id, &e).unwrap().value - 1.0).abs() < 1e-12);
    assert_eq!(hypo_modulus(&id).unwrap(), 0.0);
    let neg = sample_graph(&linear1(-1), &b, 9).unwrap();
    assert!((hypo_modulus(&neg).unwrap() - 1.0).abs() < 1e-12);
    let nc = sample_graph(&halfline(), &b, 9).unwrap();
    assert_eq!(strong_modulus(&nc, &e).unwrap().value, 0.0);
    let single = sg(&[(0.0, 0.0), (0.0, 1.0)]);
    assert!(matches!(strong_modulus(&single, &e), Err(MonoError::Degenerate(_))));
    assert_eq!(hypo_modulus(&single).unwrap(), 0.0);
}

#[test]
fn downward_jump_is_unbounded() {
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|k| {
            let x = -1.0 + 0.1 * k as f64;
            (x, if x < 0.0 { 1.0 } else { -1.0 })
        })
        .collect();
    assert!(matches!(hypo_modulus(&sg(&pts)), Err(MonoError::Unbounded { .. })));
}

#[test]
fn isc_on_halfline() {
    let s = ProbeSettings::default();
    let fail = isc_probe(&halfline(), &gp(0.0, -1.0), &DEFAULT_ISC_RADII, &s).unwrap();
    assert!(fail.is_fail());
    let pass = isc_probe(&halfline(), &gp(0.0, 0.0), &DEFAULT_ISC_RADII, &s).unwrap();
    assert!(pass.is_pass());
    let lin = isc_probe(&linear1(2), &gp(0.0, 0.0), &DEFAULT_ISC_RADII, &s).unwrap();
    assert!(lin.is_pass());
}

#[test]
fn type_a_search() {
    let b = GraphBox::new(vec![0.0], 1.0, vec![0.0], 1.0).unwrap();
    let id = type_a_witness_search(&linear1(1), &gp(0.0, 0.0), &b, 5, None).unwrap();
    assert!(id.is_pass(), "{id:?}");
    let single = Operator::polyhedral(1, vec![Polyhedron::point(&[int(0), int(0)])]).unwrap();
    let v = type_a_witness_search(&single, &gp(0.0, 0.0), &b, 5, None).unwrap();
    match v.witness {
        Some(Witness::Extension { point, .. }) => assert_eq!(point, gp(0.5, 0.0)),
        w => panic!("unexpected {w:?}"),
    }
    let par = Operator::normal_cone(ConvexSet::Parabola).unwrap();
    let line = Operator::normal_cone(ConvexSet::Polyhedron(
        Polyhedron::universe(2).with_eq(vec![int(0), int(1)], int(0)),
    ))
    .unwrap();
    let t = op_sum(&par, &line).unwrap();
    let o = GraphPoint { x: vec![0.0, 0.0], v: vec![0.0, 0.0] };
    let b2 = GraphBox::around(&o, 1.0).unwrap();
    let v = type_a_witness_search(&t, &o, &b2, 5, None).unwrap();
    match &v.witness {
        Some(w @ Witness::Extension { point, .. }) => {
            assert_eq!(point.x, vec![0.5, 0.0]);
            assert_eq!(point.v, vec![0.0, 0.0]);
            assert!(revalidate_extension(&t, &b2, w, 5, 1e-9).unwrap());
        }
        w => panic!("unexpected {w:?}"),
    }
}
