use super::*;
use crate::exact::int;
use crate::opmodel::{op_localize, op_shift_j, op_sum};
use crate::polyhedron::Polyhedron;

fn linear1(slope: i64) -> Operator {
    Operator::polyhedral(1, vec![Polyhedron::universe(2).with_eq(vec![int(slope), int(-1)], int(0))]).unwrap()
}

fn halfline() -> Operator {
    Operator::normal_cone(ConvexSet::Halfspace { a: vec![int(-1)], b: int(0) }).unwrap()
}

fn singleton() -> Operator {
    Operator::polyhedral(1, vec![Polyhedron::point(&[int(0), int(0)])]).unwrap()
}

fn example35() -> Operator {
    let line = Operator::normal_cone(ConvexSet::Polyhedron(
        Polyhedron::universe(2).with_eq(vec![int(0), int(1)], int(0)),
    ))
    .unwrap();
    let par = Operator::normal_cone(ConvexSet::Parabola).unwrap();
    op_sum(&par, &line).unwrap()
}

fn gp(x: &[f64], v: &[f64]) -> GraphPoint {
    GraphPoint::new(x.to_vec(), v.to_vec()).unwrap()
}

fn bx1(r: f64) -> GraphBox {
    GraphBox::new(vec![0.0], r, vec![0.0], r).unwrap()
}

#[test]
fn resolvent_examples() {
    let e = NormSpec::euclidean(1);
    let wide = bx1(10.0);
    assert_eq!(resolvent_solve(&halfline(), 1.0, &[-2.0], &e, &wide).unwrap().xs(), vec![vec![0.0]]);
    assert_eq!(resolvent_solve(&halfline(), 1.0, &[1.5], &e, &wide).unwrap().xs(), vec![vec![1.5]]);
    assert_eq!(resolvent_solve(&linear1(1), 1.0, &[4.0], &e, &wide).unwrap().xs(), vec![vec![2.0]]);
    assert!(resolvent_solve(&singleton(), 1.0, &[0.3], &e, &wide).unwrap().points.is_empty());
    assert!(resolvent_solve(&halfline(), 0.0, &[1.0], &e, &wide).is_err());
}

#[test]
fn smooth_and_parabola_solvers() {
    let e = NormSpec::euclidean(1);
    let cubic = Operator::Smooth(crate::opmodel::SmoothMap::cubic(1, 1.0));
    // x + x^3 = 2 has the single root 1.
    let s = resolvent_solve(&cubic, 1.0, &[2.0], &e, &bx1(3.0)).unwrap();
    assert_eq!(s.points.len(), 1);
    assert!((s.points[0].x[0] - 1.0).abs() < 1e-9);
    let p = project_parabola(&[1.0, 0.0]);
    let a = p[0];
    assert!((2.0 * a * a * a + a - 1.0).abs() < 1e-12);
    assert_eq!(project_parabola(&[0.0, 1.0]), vec![0.0, 1.0]);
}

#[test]
fn example35_has_no_solution_off_the_line() {
    let e = NormSpec::euclidean(2);
    let b = GraphBox::new(vec![0.0, 0.0], 1.0, vec![0.0, 0.0], 1.0).unwrap();
    let s = resolvent_solve(&example35(), 1.0, &[0.3, 0.0], &e, &b).unwrap();
    assert!(s.points.is_empty());
    let s = resolvent_solve(&example35(), 1.0, &[0.0, 0.3], &e, &b).unwrap();
    assert_eq!(s.xs(), vec![vec![0.0, 0.0]]);
    let (v, probe) = minty_local_probe(&example35(), &gp(&[0.0, 0.0], &[0.0, 0.0]), 1.0, &b, 9, None).unwrap();
    assert!(v.is_fail());
    assert!(!probe.full_domain);
    match v.witness.unwrap() {
        Witness::Query { y, solutions, .. } => {
            assert!(y[0] > 0.0 && y[1] == 0.0);
            assert!(solutions.is_empty());
        }
        w => panic!("unexpected witness {w:?}"),
    }
}

#[test]
fn minty_probe_examples() {
    let (v, probe) = minty_local_probe(&halfline(), &gp(&[0.0], &[0.0]), 1.0, &bx1(1.0), 9, None).unwrap();
    assert!(v.is_pass(), "{v:?}");
    assert!(probe.single_valued && probe.full_domain);
    assert!(probe.lipschitz.unwrap() <= 1.0 + 1e-12);
    let (v, probe) = minty_local_probe(&linear1(1), &gp(&[0.0], &[0.0]), 1.0, &bx1(1.0), 9, None).unwrap();
    assert!(v.is_pass());
    assert!((localization_lipschitz(&probe).unwrap() - 0.5).abs() < 1e-12);
    let loc = op_localize(&linear1(1), &bx1(1.0)).unwrap();
    assert!(minty_local_probe(&loc, &gp(&[0.0], &[0.0]), 1.0, &bx1(0.5), 9, None).unwrap().0.is_pass());
    assert!(minty_local_probe(&linear1(-1), &gp(&[0.0], &[0.0]), 1.0, &bx1(1.0), 9, None).unwrap().0.is_fail());
    assert!(minty_local_probe(&singleton(), &gp(&[0.0], &[0.0]), 1.0, &bx1(1.0), 9, None).unwrap().0.is_fail());
    let sweep = minty_sweep(&halfline(), &gp(&[0.0], &[0.0]), &DEFAULT_LAMBDAS, &bx1(1.0), 9, None).unwrap();
    assert!(sweep.is_pass());
    assert_eq!(sweep.parts.len(), 3);
    assert!(matches!(
        minty_local_probe(&halfline(), &gp(&[1.0], &[1.0]), 1.0, &bx1(1.0), 9, None),
        Err(MonoError::PointNotInSet)
    ));
}

#[test]
fn strong_inverse_examples() {
    let two = linear1(2);
    let b = GraphBox::new(vec![1.0], 1.0, vec![2.0], 1.0).unwrap();
    assert!(strong_inverse_probe(&two, &gp(&[1.0], &[2.0]), &b, 9, None, None).unwrap().is_pass());
    let b = GraphBox::new(vec![0.0], 1.0, vec![-1.0], 0.5).unwrap();
    // Near (0, -1) the graph is a vertical segment, so strong monotonicity
    // holds vacuously; only a box reaching v = 0 sees the zero modulus.
    assert!(strong_inverse_probe(&halfline(), &gp(&[0.0], &[-1.0]), &b, 9, None, None).unwrap().is_pass());
    let b = GraphBox::new(vec![0.0], 1.0, vec![-1.0], 1.0).unwrap();
    let v = strong_inverse_probe(&halfline(), &gp(&[0.0], &[-1.0]), &b, 9, None, None).unwrap();
    assert!(v.is_pass());
    assert!(v.notes.iter().any(|n| n.contains("0.5")));
    let b = GraphBox::new(vec![0.0], 1.0, vec![0.0], 1.0).unwrap();
    let v = strong_inverse_probe(&halfline(), &gp(&[0.0], &[0.0]), &b, 9, None, None).unwrap();
    assert!(v.is_fail());
    let shifted = op_shift_j(&linear1(1), 1.0, &NormSpec::euclidean(1)).unwrap();
    let v = strong_inverse_probe(&shifted, &gp(&[0.0], &[0.0]), &bx1(1.0), 9, Some(1.0), None).unwrap();
    assert!(v.is_pass());
    assert!((v.moduli.sigma_hat.unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn shift_consistency() {
    let e = NormSpec::euclidean(1);
    for op in [linear1(1), linear1(-1), halfline(), singleton()] {
        let pt = gp(&[0.0], &[0.0]);
        let m = minty_local_probe(&op, &pt, 1.0, &bx1(1.0), 9, None).unwrap().0;
        for sigma in [0.5, 1.0, 2.0] {
            let sh = op_shift_j(&op, sigma, &e).unwrap();
            let s = strong_inverse_probe(&sh, &pt, &bx1(1.0), 9, Some(sigma), None).unwrap();
            assert_eq!(m.status, s.status, "{} at sigma {sigma}", op.describe());
        }
    }
}

#[test]
fn transvected_lipschitz_bound() {
    let region = bx1(1.0);
    let t = op_localize(&Operator::polyhedral(1, vec![Polyhedron::universe(2).with_eq(vec![int(-1), int(-2)], int(0))]).unwrap(), &region).unwrap();
    for sigma in [1.0, 2.0] {
        let (v, probe) = transvected_probe(&t, &gp(&[0.0], &[0.0]), sigma, &bx1(0.5), 9, None).unwrap();
        assert!(v.is_pass(), "{v:?}");
        let l = localization_lipschitz(&probe).unwrap();
        assert!(l <= 1.0 / (sigma - 0.5) + 1e-6, "{l}");
    }
}

#[test]
fn residuals_are_small() {
    let e = NormSpec::euclidean(1);
    let op = halfline();
    for y in [-2.0, -0.5, 0.0, 0.25, 3.0] {
        for p in resolvent_solve(&op, 1.0, &[y], &e, &bx1(10.0)).unwrap().points {
            let want = y - p.x[0];
            assert!(op.contains_pair(&p.x, &[want], 1e-12).unwrap());
        }
    }
}
