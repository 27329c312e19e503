use super::*;
use crate::exact::int;

fn line_graph(slope: i64) -> Operator {
    Operator::polyhedral(1, vec![Polyhedron::universe(2).with_eq(vec![int(slope), int(-1)], int(0))]).unwrap()
}

fn halfline() -> Operator {
    Operator::normal_cone(ConvexSet::Halfspace { a: vec![int(-1)], b: int(0) }).unwrap()
}

fn parabola_plus_line() -> Operator {
    let par = Operator::normal_cone(ConvexSet::Parabola).unwrap();
    let line = Operator::normal_cone(ConvexSet::Polyhedron(
        Polyhedron::universe(2).with_eq(vec![int(0), int(1)], int(0)),
    ))
    .unwrap();
    op_sum(&par, &line).unwrap()
}

fn bx1(r: f64) -> GraphBox {
    GraphBox::new(vec![0.0], r, vec![0.0], r).unwrap()
}

#[test]
fn halfline_slices() {
    let t = halfline();
    let at0 = t.evaluate(&[0.0], &bx1(5.0), 1e-9).unwrap();
    assert_eq!(at0.vertices(), vec![vec![-5.0], vec![0.0]]);
    assert!(at0.contains(&[-2.5], 0.0));
    let at1 = t.evaluate(&[1.0], &bx1(5.0), 1e-9).unwrap();
    assert_eq!(at1.vertices(), vec![vec![0.0]]);
    assert!(t.evaluate(&[-1.0], &bx1(5.0), 1e-9).unwrap().is_empty());
}

#[test]
fn sum_with_identity_is_minkowski() {
    let s = op_sum(&line_graph(1), &halfline()).unwrap();
    let at0 = s.evaluate(&[0.0], &bx1(5.0), 1e-9).unwrap();
    assert_eq!(at0.vertices(), vec![vec![-5.0], vec![0.0]]);
    let at2 = s.evaluate(&[2.0], &bx1(5.0), 1e-9).unwrap();
    assert_eq!(at2.vertices(), vec![vec![2.0]]);
}

#[test]
fn shift_and_double_inverse() {
    let spec = NormSpec::euclidean(1);
    let s = op_shift_j(&line_graph(1), 1.0, &spec).unwrap();
    let b = GraphBox::new(vec![0.0], 5.0, vec![0.0], 10.0).unwrap();
    assert_eq!(s.evaluate(&[2.0], &b, 1e-9).unwrap().vertices(), vec![vec![4.0]]);
    let t = halfline();
    let back = op_inverse(&op_inverse(&t));
    assert_eq!(back.graph().unwrap(), t.graph().unwrap());
    let unshift = op_shift_j(&s, -1.0, &spec).unwrap();
    assert_eq!(unshift.graph().unwrap().pieces()[0].vrep(), line_graph(1).graph().unwrap().pieces()[0].vrep());
}

#[test]
fn example_sum_values() {
    let t = parabola_plus_line();
    let b = GraphBox::new(vec![0.0, 0.0], 1.0, vec![0.0, 0.0], 1.0).unwrap();
    let at0 = t.evaluate(&[0.0, 0.0], &b, 1e-9).unwrap();
    assert!(at0.contains(&[0.0, 1.0], 1e-12));
    assert!(at0.contains(&[0.0, -1.0], 1e-12));
    assert!(!at0.contains(&[0.5, 0.0], 1e-12));
    assert!(t.evaluate(&[0.1, 0.01], &b, 1e-9).unwrap().is_empty());
    let g = t.graph().expect("finite domain intersection");
    assert_eq!(g.pieces().len(), 1);
    let s = sample_graph(&t, &b, 5).unwrap();
    for p in s.points() {
        assert_eq!(p.x, vec![0.0, 0.0]);
        assert_eq!(p.v[0], 0.0);
        assert!(p.v[1].abs() <= 1.0);
    }
    assert!(s.len() >= 5);
}

#[test]
fn samples_of_basic_graphs() {
    let id = sample_graph(&line_graph(1), &bx1(1.0), 3).unwrap();
    for p in [[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]] {
        assert!(id.points().iter().any(|q| q.x[0] == p[0] && q.v[0] == p[1]));
    }
    let nc = sample_graph(&halfline(), &bx1(1.0), 3).unwrap();
    for p in [[0.0, 0.0], [0.0, -1.0], [1.0, 0.0]] {
        assert!(nc.points().iter().any(|q| q.x[0] == p[0] && q.v[0] == p[1]));
    }
    for q in nc.points() {
        assert!(halfline().contains_pair(&q.x, &q.v, 1e-10).unwrap());
    }
}

#[test]
fn localization_filters_samples() {
    let t = line_graph(2);
    let region = GraphBox::new(vec![0.0], 0.5, vec![0.0], 0.5).unwrap();
    let loc = op_localize(&t, &region).unwrap();
    let b = bx1(1.0);
    let a = sample_graph(&t, &b, 9).unwrap();
    let l = sample_graph(&loc, &b, 9).unwrap();
    let filtered: Vec<_> = a.points().iter().filter(|p| region.contains(p, 0.0)).cloned().collect();
    for p in &filtered {
        assert!(l.points().contains(p));
    }
    for p in l.points() {
        assert!(region.contains(p, 0.0));
    }
    assert!(loc.evaluate(&[0.75], &b, 1e-9).unwrap().is_empty());
}

#[test]
fn scaled_and_zero_scaled() {
    let t = op_scale(&line_graph(1), 3.0).unwrap();
    let b = GraphBox::new(vec![0.0], 1.0, vec![0.0], 5.0).unwrap();
    assert_eq!(t.evaluate(&[1.0], &b, 1e-9).unwrap().vertices(), vec![vec![3.0]]);
    let z = op_scale(&halfline(), 0.0).unwrap();
    assert_eq!(z.evaluate(&[0.0], &b, 1e-9).unwrap().vertices(), vec![vec![0.0]]);
}

#[test]
fn dimension_checks() {
    let t2 = Operator::normal_cone(ConvexSet::Parabola).unwrap();
    assert!(matches!(op_sum(&line_graph(1), &t2), Err(MonoError::DimensionMismatch { .. })));
    assert!(line_graph(1).evaluate(&[3.0], &bx1(1.0), 1e-9).is_err());
}
