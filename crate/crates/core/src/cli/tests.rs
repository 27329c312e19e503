use super::scene::{parse_scene, Header};
use super::*;
use proptest::prelude::*;

const FIXTURE: &str = include_str!("../../tests/fixtures/acceptance.scene");

fn parse_err(text: &str) -> ParseError {
    parse_scene(text).expect_err("scene should be rejected")
}

#[test]
fn canonical_text_is_a_fixpoint() {
    for text in [FIXTURE, include_str!("../../tests/fixtures/example35.scene")] {
        let a = parse_scene(text).unwrap();
        let t1 = a.to_text();
        let b = parse_scene(&t1).unwrap();
        assert_eq!(b.to_text(), t1);
        assert_eq!(a.requests, b.requests);
        assert_eq!(
            a.operators.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            b.operators.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn fixture_contents() {
    let s = parse_scene(FIXTURE).unwrap();
    assert_eq!(s.operators.len(), 6);
    assert_eq!(s.requests.len(), 7);
    assert_eq!(s.requests[0].run, "minty_local_probe");
    assert_eq!(s.requests[0].point.v, vec![-1.0]);
    assert_eq!(s.requests[2].shear, Some(1.0));
    assert_eq!(s.requests[6].y, Some(vec![-1.5]));
    assert!(matches!(s.sections[0].header, Header::Norm));
}

#[test]
fn error_positions() {
    let e = parse_err("[operator A]\nsum = B C\n");
    assert_eq!((e.code, e.line, e.column), ("UNKNOWN_OPERATOR", 2, 7));

    // Operators may only refer to earlier definitions.
    let e = parse_err("[operator A]\ninverse = B\n\n[operator B]\ncatalog = identity\n");
    assert_eq!((e.code, e.line), ("UNKNOWN_OPERATOR", 2));

    let e = parse_err("[operator A]\ncatalog = identity\n[analysis]\nrun = isc_probe\nop = A\nx = 0 0\nv = 0\n");
    assert_eq!((e.code, e.line, e.column), ("DIMENSION_MISMATCH", 6, 5));

    let e = parse_err("[analysis]\nrun = isc_probe\nop = Z\nx = 0\nv = 0\n");
    assert_eq!((e.code, e.line), ("UNKNOWN_OPERATOR", 3));

    let e = parse_err("[operatr A]\n");
    assert_eq!((e.code, e.line, e.column), ("PARSE_ERROR", 1, 1));

    let e = parse_err("[operator A]\n  catalog identity\n");
    assert_eq!((e.code, e.line, e.column), ("PARSE_ERROR", 2, 3));

    let e = parse_err("[operator A]\ncatalog = identity\nlinear = 1\n");
    assert_eq!((e.code, e.line), ("PARSE_ERROR", 3));

    let e = parse_err("[operator A]\ncatalog = nonesuch\n");
    assert_eq!((e.code, e.line), ("UNKNOWN_NAME", 2));

    let e = parse_err("[norm]\nweights = 1 1\n[operator A]\ncatalog = identity\n[operator B]\nshift = A\nsigma = 1\n");
    assert_eq!((e.code, e.line), ("DIMENSION_MISMATCH", 6));

    let e = parse_err("key = 1\n");
    assert_eq!(e.code, "PARSE_ERROR");
    assert!(e.to_string().starts_with("line 1, column 1: PARSE_ERROR"));
}

#[test]
fn piece_operator_matches_halfline_cone() {
    let s = parse_scene(
        "[operator P]\ndim = 1\npiece = 1 0 >= 0 ; 0 1 = 0\npiece = 1 0 = 0 ; 0 1 <= 0\n\n[operator H]\ncatalog = normal_cone_halfline\n",
    )
    .unwrap();
    let p = s.operator("P").unwrap();
    let h = s.operator("H").unwrap();
    for (x, v) in [(0.0, -3.0), (2.0, 0.0), (0.0, 0.0), (1.0, -1.0), (-0.5, 0.0)] {
        assert_eq!(
            p.contains_pair(&[x], &[v], 1e-12).unwrap(),
            h.contains_pair(&[x], &[v], 1e-12).unwrap(),
            "({x}, {v})"
        );
    }
}

#[test]
fn composite_kinds_build() {
    let s = parse_scene(
        "[operator A]\nsmooth = affine\nmatrix = 2 1 ; 0 3\noffset = 1 0\n\n[operator B]\nnormal_cone = box\nlo = -1 -1\nhi = 1 1\n\n\
         [operator C]\nsum = A B\n\n[operator D]\nscale = C\nfactor = 2\n\n[operator E]\nlocalize = D\nx = 0 0\nv = 2 0\nradius = 0.5\n\n\
         [operator F]\ninverse = E\n\n[operator G]\nlinear = 1 2 ; 3 4\n\n[operator K]\npoint = 0 ; 1\npoint = 1 ; 2\n",
    )
    .unwrap();
    assert_eq!(s.operators.len(), 8);
    let a = s.operator("A").unwrap();
    assert!(a.contains_pair(&[1.0, 1.0], &[4.0, 3.0], 1e-12).unwrap());
    let k = s.operator("K").unwrap();
    assert!(k.contains_pair(&[1.0], &[2.0], 1e-12).unwrap());
}

#[test]
fn run_records_errors_per_request() {
    let s = parse_scene(
        "[norm]\np = 3\n\n[operator A]\ncatalog = identity\n\n[analysis]\nrun = psd_criterion\nop = A\nx = 0\nv = 0\n\n\
         [analysis]\nrun = hypo_modulus\nop = A\nx = 0\nv = 0\n",
    )
    .unwrap();
    let out = run_scene(&s, &RunOptions::default());
    assert!(out.incomplete);
    assert_eq!(out.report["requests"][0]["status"], "ERROR");
    assert_eq!(out.report["requests"][0]["error"]["code"], "UNSUPPORTED");
    assert_eq!(out.report["requests"][1]["status"], "DONE");
    assert_eq!(out.report["summary"]["error"], 1);
}

#[test]
fn plots_only_for_one_dimensional_requests() {
    let s = parse_scene(FIXTURE).unwrap();
    let out = run_scene(
        &s,
        &RunOptions {
            plot: true,
            ..Default::default()
        },
    );
    assert_eq!(out.plots.len(), 7);
    assert!(out.plots.iter().all(|p| p.svg.starts_with("<svg") && p.svg.contains("clipPath")));
    assert!(out.report["requests"].as_array().unwrap().iter().all(|r| r.get("wall_clock").is_none()));
}

#[test]
fn every_fail_is_revalidated() {
    let s = parse_scene(FIXTURE).unwrap();
    let out = run_scene(&s, &RunOptions::default());
    for r in out.report["requests"].as_array().unwrap() {
        if r["status"] == "FAIL" {
            assert_eq!(r["revalidated"], true, "{}", r["run"]);
        }
    }
}

fn noisy(text: &str, pads: &[(usize, usize, bool)]) -> String {
    // Re-spaces keys and values and sprinkles comments and blank lines.
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let (a, b, c) = pads[i % pads.len()];
        if c {
            out.push_str("# note\n\n");
        }
        match line.split_once('=') {
            Some((k, v)) if !line.trim_start().starts_with('#') => {
                let v = v.split_whitespace().collect::<Vec<_>>().join(&" ".repeat(b + 1));
                out.push_str(&format!("{}{}{}={}{}\n", " ".repeat(a), k.trim(), " ".repeat(b), " ".repeat(a), v));
            }
            _ => {
                out.push_str(&" ".repeat(a));
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn whitespace_and_comments_do_not_change_the_scene(pads in prop::collection::vec((0usize..3, 0usize..3, any::<bool>()), 1..8)) {
        let base = parse_scene(FIXTURE).unwrap();
        let s = parse_scene(&noisy(FIXTURE, &pads)).unwrap();
        prop_assert_eq!(s.to_text(), base.to_text());
        prop_assert_eq!(s.requests, base.requests);
    }
}

#[test]
fn spec_scene_examples() {
    let s = parse_scene("[operator A]\ncatalog = identity\n\n[analysis]\nrun = monotone_witness\nop = A\nx = 0\nv = 0\n").unwrap();
    assert_eq!((s.operators.len(), s.requests.len()), (1, 1));
    let out = run_scene(&s, &RunOptions::default());
    assert_eq!(out.report["requests"][0]["status"], "PASS");

    let e = parse_err("[analysis]\nrun = monotone_witness\nop = T9\nx = 0\nv = 0\n");
    assert_eq!(e.code, "UNKNOWN_OPERATOR");
    assert!(e.message.contains("T9"));

    let s = parse_scene(include_str!("../../tests/fixtures/example35.scene")).unwrap();
    assert_eq!((s.operators.len(), s.requests.len()), (3, 2));
    let out = run_scene(&s, &RunOptions::default());
    let w = &out.report["requests"][0]["verdict"]["witness"]["point"];
    assert_eq!(w["x"], serde_json::json!([0.5, 0.0]));
    assert_eq!(w["v"], serde_json::json!([0.0, 0.0]));
    assert_eq!(out.report["requests"][1]["verdict"]["witness"]["kind"], "coderivative");
}

#[test]
fn lambda_sweep_gives_three_passing_records() {
    let s = parse_scene(
        "[operator H]\ncatalog = normal_cone_halfline\n\n[analysis]\nrun = minty_local_probe\nop = H\nx = 0\nv = 0\nlambdas = 0.5 1 2\n",
    )
    .unwrap();
    let out = run_scene(&s, &RunOptions::default());
    let v = &out.report["requests"][0]["verdict"];
    assert_eq!(v["status"], "PASS");
    let parts = v["parts"].as_array().unwrap();
    assert_eq!(parts.len(), 3);
    assert!(parts.iter().all(|p| p[1]["status"] == "PASS"));
}

#[test]
fn empty_scene_report() {
    let s = parse_scene("# nothing\n").unwrap();
    let out = run_scene(&s, &RunOptions::default());
    assert_eq!(out.report["schema"], "monolab-report/1");
    assert_eq!(out.report["requests"], serde_json::json!([]));
    assert!(!out.incomplete);
}

fn graph_lines(svg: &str) -> Vec<[f64; 4]> {
    svg.lines()
        .filter(|l| l.starts_with("<line") && l.contains("#08519c"))
        .map(|l| {
            let attr = |k: &str| -> f64 {
                let s = &l[l.find(&format!(" {k}=\"")).unwrap() + k.len() + 3..];
                s[..s.find('"').unwrap()].parse().unwrap()
            };
            [attr("x1"), attr("y1"), attr("x2"), attr("y2")]
        })
        .collect()
}

#[test]
fn plot_examples() {
    use crate::catalog::{builtin, Params};
    use crate::normgeom::NormSpec;
    use crate::opmodel::GraphBox;
    use plot::{render, Overlays};
    let bx = GraphBox::new(vec![0.0], 1.0, vec![0.0], 1.0).unwrap();

    let id = builtin("identity", &Params::new()).unwrap();
    let svg = render(&id, &bx, 5, &Overlays::default()).unwrap();
    let lines = graph_lines(&svg);
    assert_eq!(lines.len(), 1);
    let [x1, y1, x2, y2] = lines[0];
    assert!((x2 - x1).abs() == 720.0 && (y2 - y1).abs() == 520.0);

    let h = builtin("normal_cone_halfline", &Params::new()).unwrap();
    let lines = graph_lines(&render(&h, &bx, 5, &Overlays::default()).unwrap());
    assert_eq!(lines.len(), 2);
    let horizontal = lines.iter().filter(|l| l[1] == l[3]).count();
    let vertical = lines.iter().filter(|l| l[0] == l[2]).count();
    assert_eq!((horizontal, vertical), (1, 1));
    // Both rays start at the origin (400, 300).
    assert!(lines.iter().all(|l| (l[0] == 400.0 && l[1] == 300.0) || (l[2] == 400.0 && l[3] == 300.0)));

    let ov = Overlays {
        shear: Some((1.0, NormSpec::euclidean(1))),
        ..Default::default()
    };
    let svg = render(&id, &bx, 5, &ov).unwrap();
    let sheared: Vec<&str> = svg.lines().filter(|l| l.contains("#31a354")).collect();
    assert_eq!(sheared.len(), 1);
    let l = sheared[0];
    // Image of (-1,-1)-(1,1) is (-1,-2)-(1,2): slope 2 in data units.
    assert!(l.contains("820.000") && l.contains("-220.000"), "{l}");

    let lin = builtin("linear", &Params::new()).unwrap();
    let b2 = GraphBox::new(vec![0.0; 2], 1.0, vec![0.0; 2], 1.0).unwrap();
    assert_eq!(render(&lin, &b2, 5, &Overlays::default()).unwrap_err().code(), "UNSUPPORTED_DIMENSION");
}

#[test]
fn plot_requests_for_planar_operators_record_the_error() {
    let s = parse_scene(include_str!("../../tests/fixtures/example35.scene")).unwrap();
    let out = run_scene(
        &s,
        &RunOptions {
            plot: true,
            ..Default::default()
        },
    );
    assert_eq!(out.report["requests"][0]["plot_error"]["code"], "UNSUPPORTED_DIMENSION");
    assert!(!out.incomplete);
}
