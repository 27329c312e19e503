use super::*;
use crate::monocheck::strong_modulus;
use crate::normgeom::NormSpec;
use crate::opmodel::{sample_graph, ValueSet};

fn params(kv: &[(&str, &str)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn builtin_examples() {
    let t = builtin("example35_sum", &Params::new()).unwrap();
    match t.value_at(&[0.0, 0.0], 1e-12).unwrap() {
        ValueSet::Slice { pieces, .. } => {
            assert!(pieces.iter().any(|p| p.contains(&[int(0), int(7)])));
            assert!(pieces.iter().all(|p| !p.contains(&[int(1), int(0)])));
        }
        v => panic!("{v:?}"),
    }
    let a = builtin("abs_subdifferential", &Params::new()).unwrap();
    let v = a.value_at(&[0.0], 1e-12).unwrap();
    assert!(v.contains(&[-1.0], 0.0) && v.contains(&[1.0], 0.0) && !v.contains(&[1.5], 1e-9));
    let lin = builtin("linear", &params(&[("matrix", "2 0 ; 0 5")])).unwrap();
    let b = GraphBox::new(vec![0.0, 0.0], 1.0, vec![0.0, 0.0], 6.0).unwrap();
    let g = sample_graph(&lin, &b, 5).unwrap();
    assert!((strong_modulus(&g, &NormSpec::euclidean(2)).unwrap().value - 2.0).abs() < 1e-12);
}

#[test]
fn errors() {
    assert!(matches!(builtin("nope", &Params::new()), Err(MonoError::UnknownName(_))));
    assert!(matches!(expected("nope"), Err(MonoError::UnknownName(_))));
    assert!(matches!(builtin("identity", &params(&[("slope", "2")])), Err(MonoError::BadParams(_))));
    assert!(matches!(builtin("linear", &params(&[("matrix", "1 2 ; 3")])), Err(MonoError::BadParams(_))));
    assert!(matches!(builtin("truncated_identity", &params(&[("gap", "1 0")])), Err(MonoError::BadParams(_))));
    assert!(matches!(builtin("normal_cone_polyhedron", &params(&[("a", "1 ; -1"), ("b", "0 -1")])), Err(MonoError::BadParams(_))));
}

#[test]
fn every_entry_is_consistent() {
    for name in NAMES {
        let e = expected(name).unwrap();
        let op = builtin(name, &Params::new()).unwrap();
        assert_eq!(e.dim, op.dim(), "{name}");
        assert!(!e.points.is_empty());
        for r in &e.points {
            assert!(op.contains_pair(&r.point.x, &r.point.v, 1e-12).unwrap(), "{name} {:?}", r.point);
        }
    }
}

#[test]
fn example_sum_qualification() {
    let q = expected("example35_sum").unwrap().qualification.unwrap();
    assert!(q.int_dom_second_empty && !q.int_dom_first_empty);
    assert!(!q.first_meets_int_second && !q.second_meets_int_first);
    assert!(!q.holds());
    let halfline = builtin("normal_cone_halfline", &Params::new()).unwrap();
    let id = builtin("identity", &Params::new()).unwrap();
    assert!(qualification_report(&id, &halfline).unwrap().holds());
    let par = builtin("normal_cone_parabola", &Params::new()).unwrap();
    let bx = builtin("normal_cone_box", &Params::new()).unwrap();
    assert!(qualification_report(&par, &bx).unwrap().holds());
}
