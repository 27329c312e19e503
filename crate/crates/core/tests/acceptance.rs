//! Acceptance suite: each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does.

use monolab::catalog::{self, builtin, expected, linear_graph, qualification_report, Params, NAMES};
use monolab::exact::{self, QVec};
use monolab::monocheck::{isc_probe, strong_modulus, type_a_witness_search, ProbeSettings};
use monolab::normgeom::{duality_map, shear_transvect, shear_transvect_inverse, shear_vertical, GraphPoint, NormSpec};
use monolab::opmodel::{op_inverse, op_localize, op_shift_j, op_sum, sample_graph, GraphBox, Operator};
use monolab::resolvent::{localization_lipschitz, minty_local_probe, transvected_probe};
use monolab::vardiff::{limiting_coderivative, local_max_via_coderivative, psd_criterion, regular_coderivative, supremal_psd_sigma};
use monolab::verdict::Witness;
use monolab::MonoError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

const DENSITY: usize = 5;

fn origin(n: usize) -> GraphPoint {
    GraphPoint {
        x: vec![0.0; n],
        v: vec![0.0; n],
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: MonoError) -> String {
    e.to_string()
}

fn oracle_equivalence() -> Outcome {
    let mut ops = 0;
    let mut points = 0;
    let mut disagreements = Vec::new();
    for name in NAMES {
        let e = expected(name).map_err(e2s)?;
        let op = builtin(name, &Params::new()).map_err(e2s)?;
        let tol = if e.polyhedral { None } else { Some(1e-6) };
        ops += 1;
        for r in &e.points {
            let b = r.graph_box();
            let m = minty_local_probe(&op, &r.point, 1.0, &b, DENSITY, tol).map_err(e2s)?.0;
            let c = local_max_via_coderivative(&op, &r.point, &b, DENSITY, 0.0).map_err(e2s)?;
            points += 1;
            if m.status != c.status || m.status != r.local_max.status {
                disagreements.push(format!(
                    "{name} at {:?}: minty {:?}, coderivative {:?}, expected {:?}",
                    r.point, m.status, c.status, r.local_max.status
                ));
            }
        }
    }
    check(ops >= 10 && points >= 3 * ops, || format!("only {ops} operators / {points} points"))?;
    check(disagreements.is_empty(), || disagreements.join("; "))?;
    Ok(format!("{ops} operators, {points} points, 0 disagreements"))
}

fn example_sum() -> Outcome {
    let op = builtin("example35_sum", &Params::new()).map_err(e2s)?;
    let pt = origin(2);
    let bx = GraphBox::around(&pt, 1.0).map_err(e2s)?;
    let a = type_a_witness_search(&op, &pt, &bx, DENSITY, None).map_err(e2s)?;
    let alpha = match &a.witness {
        Some(Witness::Extension { point, .. })
            if a.is_fail() && point.x[0] > 0.0 && point.x[1] == 0.0 && point.v == vec![0.0, 0.0] =>
        {
            point.x[0]
        }
        w => return Err(format!("typeA: {:?} with witness {w:?}", a.status)),
    };
    let p = psd_criterion(&op, &bx, 0.0, DENSITY).map_err(e2s)?;
    match &p.witness {
        Some(Witness::Coderivative { w, z, value, .. })
            if p.is_fail() && w == &vec![1.0, 0.0] && *value == -1.0 && z[0] * w[0] + z[1] * w[1] == -1.0 => {}
        w => return Err(format!("psd: {:?} with witness {w:?}", p.status)),
    }
    let (t1, t2) = catalog::summands("example35_sum").ok_or("no summands")?;
    let q = qualification_report(&builtin(t1, &Params::new()).map_err(e2s)?, &builtin(t2, &Params::new()).map_err(e2s)?)
        .map_err(e2s)?;
    check(q.int_dom_second_empty && !q.holds(), || format!("qualification report {q:?}"))?;
    Ok(format!("typeA witness ((alpha,0),(0,0)) with alpha={alpha}, psd value -1 at w=(1,0), int dom T2 empty"))
}

fn modulus_consistency() -> Outcome {
    let op = builtin("linear", &Params::new()).map_err(e2s)?;
    let bx = GraphBox::around(&origin(2), 1.0).map_err(e2s)?;
    let s = supremal_psd_sigma(&op, &bx, DENSITY).map_err(e2s)?;
    let g = sample_graph(&op, &bx, 2 * DENSITY + 1).map_err(e2s)?;
    let m = strong_modulus(&g, &NormSpec::euclidean(2)).map_err(e2s)?.value;
    check((s - 2.0).abs() <= 1e-6 && (s - m).abs() <= 1e-6, || format!("supremal sigma {s}, strong modulus {m}"))?;
    Ok(format!("supremal sigma {s:.9}, strong modulus {m:.9}"))
}

fn transvected_lipschitz(op: &Operator, pt: &GraphPoint, bx: &GraphBox, sigma: f64) -> Result<Option<f64>, String> {
    let (_, probe) = transvected_probe(op, pt, sigma, bx, DENSITY, Some(1e-6)).map_err(e2s)?;
    match probe.lipschitz.map(Ok).unwrap_or_else(|| localization_lipschitz(&probe)) {
        Ok(l) => Ok(Some(l)),
        Err(MonoError::Degenerate(_)) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn lipschitz_bound() -> Outcome {
    let half = exact::ratio(-1, 2);
    let t = linear_graph(&[vec![half]]).map_err(e2s)?;
    let pt = origin(1);
    let bx = GraphBox::around(&pt, 1.0).map_err(e2s)?;
    let t = op_localize(&t, &bx).map_err(e2s)?;
    let mut detail = Vec::new();
    for sigma in [1.0, 2.0] {
        let bound = 1.0 / (sigma - 0.5);
        let l = transvected_lipschitz(&t, &pt, &bx, sigma)?.ok_or("hypomonotone probe solved fewer than two queries")?;
        check(l <= bound + 1e-6, || format!("sigma={sigma}: {l} > {bound}"))?;
        detail.push(format!("sigma={sigma}: {l:.6} <= {bound:.6}"));
    }
    let mut checked = 0;
    for name in NAMES {
        let e = expected(name).map_err(e2s)?;
        if !e.monotone {
            continue;
        }
        let op = builtin(name, &Params::new()).map_err(e2s)?;
        for r in &e.points {
            if let Some(l) = transvected_lipschitz(&op, &r.point, &r.graph_box(), 1.0)? {
                check(l <= 1.0 + 1e-6, || format!("{name} at {:?}: {l}", r.point))?;
                checked += 1;
            }
        }
    }
    check(checked > 0, || "no monotone entry produced an estimate".into())?;
    Ok(format!("{}; monotone entries at sigma=1: {checked} estimates <= 1", detail.join(", ")))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn duality_and_shears() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for i in 0..10_000 {
        let n = rng.random_range(1..=3);
        let p = if i % 4 == 0 { 2.0 } else { rng.random_range(1.5..6.0) };
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let spec = NormSpec::new(p, w).map_err(e2s)?;
        // Coordinates are kept away from zero, where J is not smooth for p < 2.
        let x: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.1..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let j = duality_map(&x, &spec).map_err(e2s)?;
        let nx2 = spec.norm(&x).powi(2);
        let jx: f64 = j.iter().zip(&x).map(|(a, b)| a * b).sum();
        let nj2 = spec.dual_norm(&j).powi(2);
        check(rel(jx, nx2) <= 1e-9 && rel(nj2, nx2) <= 1e-9, || format!("duality at {x:?} (p={p}): {jx} {nx2} {nj2}"))?;

        let h = 1e-5;
        let half_sq = |y: &[f64]| 0.5 * spec.norm(y).powi(2);
        for k in 0..n {
            let mut a = x.clone();
            let mut b = x.clone();
            a[k] += h;
            b[k] -= h;
            let fd = (half_sq(&a) - half_sq(&b)) / (2.0 * h);
            check((fd - j[k]).abs() <= 1e-6 * j[k].abs().max(1.0), || format!("gradient at {x:?} (p={p}): {fd} vs {}", j[k]))?;
        }

        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let sigma = rng.random_range(0.1..4.0);
        let g = GraphPoint { x: x.clone(), v: v.clone() };
        let back = shear_vertical(&shear_vertical(&g, sigma, &spec).map_err(e2s)?, -sigma, &spec).map_err(e2s)?;
        let back2 = shear_transvect_inverse(&shear_transvect(&g, sigma), sigma).map_err(e2s)?;
        for b in [&back, &back2] {
            let err = b.x.iter().chain(&b.v).zip(g.x.iter().chain(&g.v)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            check(err <= 1e-12 * 10.0f64.max(sigma * 3.0), || format!("round trip error {err} at {g:?}"))?;
        }
    }

    // Exact transvection identity on polyhedral entries.
    let entries = ["identity", "neg_identity", "abs_subdifferential", "normal_cone_halfline", "relu_graph", "normal_cone_box"];
    for name in entries {
        let op = builtin(name, &Params::new()).map_err(e2s)?;
        let n = op.dim();
        let g = op.graph().ok_or(format!("{name} has no polyhedral graph"))?;
        for sigma in [1i64, 2] {
            let s = exact::int(sigma);
            let shifted = op_inverse(&op_shift_j(&op, sigma as f64, &NormSpec::euclidean(n)).map_err(e2s)?);
            let h = shifted.graph().ok_or(format!("{name}: transvected graph not polyhedral"))?;
            let delta = |z: &QVec| -> QVec {
                let (x, v) = z.split_at(n);
                let mut out: QVec = v.iter().zip(x).map(|(v, x)| v + &s * x).collect();
                out.extend(x.iter().cloned());
                out
            };
            let mut mapped: Vec<QVec> = g.vertices().iter().map(delta).collect();
            let mut target = h.vertices();
            mapped.sort_by(|a, b| exact::cmp_vec(a, b));
            target.sort_by(|a, b| exact::cmp_vec(a, b));
            check(mapped == target, || format!("{name} sigma={sigma}: vertex sets differ"))?;
            for piece in g.pieces() {
                let z = piece.relint_point().ok_or(format!("{name}: empty piece"))?;
                check(h.pieces().iter().any(|q| q.contains(&delta(&z))), || format!("{name} sigma={sigma}: image point off the graph"))?;
            }
        }
    }
    Ok(format!("10^4 random duality, gradient and round-trip checks; exact transvection identity on {} entries", entries.len()))
}

fn sum_rule() -> Outcome {
    let id = builtin("identity", &Params::new()).map_err(e2s)?;
    let h = builtin("normal_cone_halfline", &Params::new()).map_err(e2s)?;
    let s = op_sum(&id, &h).map_err(e2s)?;
    for (x, v) in [(1.0, 1.0), (0.0, 0.0), (0.0, -1.0)] {
        let pt = GraphPoint { x: vec![x], v: vec![v] };
        let bx = GraphBox::around(&pt, 1.0).map_err(e2s)?;
        let m = minty_local_probe(&s, &pt, 1.0, &bx, DENSITY, None).map_err(e2s)?.0;
        check(m.is_pass(), || format!("sum at ({x}, {v}): {:?}", m.status))?;
    }
    let settings = ProbeSettings::default();
    let radii = monolab::monocheck::DEFAULT_ISC_RADII;
    let a = isc_probe(&h, &GraphPoint { x: vec![0.0], v: vec![-1.0] }, &radii, &settings).map_err(e2s)?;
    let b = isc_probe(&h, &origin(1), &radii, &settings).map_err(e2s)?;
    check(a.is_fail() && b.is_pass(), || format!("isc at (0,-1): {:?}, at (0,0): {:?}", a.status, b.status))?;
    Ok("identity + halfline cone passes at 3 points; isc FAIL at (0,-1), PASS at (0,0)".into())
}

fn localization_invariance() -> Outcome {
    let mut count = 0;
    for name in NAMES {
        let e = expected(name).map_err(e2s)?;
        if !e.polyhedral {
            continue;
        }
        let op = builtin(name, &Params::new()).map_err(e2s)?;
        for r in e.points.iter().take(3) {
            let loc = op_localize(&op, &r.graph_box()).map_err(e2s)?;
            let (a, b) = (regular_coderivative(&op, &r.point).map_err(e2s)?, regular_coderivative(&loc, &r.point).map_err(e2s)?);
            let (c, d) = (limiting_coderivative(&op, &r.point).map_err(e2s)?, limiting_coderivative(&loc, &r.point).map_err(e2s)?);
            check(a == b && c == d, || format!("{name} at {:?}", r.point))?;
            count += 1;
        }
    }
    Ok(format!("{count} points on polyhedral entries, regular and limiting cones identical"))
}

fn determinism() -> Outcome {
    let scene = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/acceptance.scene");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("report{k}.json"));
        let plots = dir.path().join(format!("plots{k}"));
        let st = Command::new(env!("CARGO_BIN_EXE_monolab"))
            .args(["run", scene.to_str().unwrap(), "--seed", "0", "--out"])
            .arg(&out)
            .arg("--plot")
            .arg(&plots)
            .status()
            .map_err(|e| e.to_string())?;
        check(st.success(), || format!("run {k} exited with {st}"))?;
        let mut files = vec![("report.json".to_string(), std::fs::read(&out).map_err(|e| e.to_string())?)];
        let mut names: Vec<_> = std::fs::read_dir(&plots).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for n in names {
            files.push((n.to_string_lossy().into_owned(), std::fs::read(plots.join(&n)).map_err(|e| e.to_string())?));
        }
        outputs.push(files);
    }
    check(outputs[0] == outputs[1], || "outputs differ between runs".into())?;
    Ok(format!("report and {} SVG files byte-identical", outputs[0].len() - 1))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("example sum", example_sum),
        ("modulus consistency", modulus_consistency),
        ("lipschitz bound", lipschitz_bound),
        ("duality and shears", duality_and_shears),
        ("sum rule", sum_rule),
        ("localization invariance", localization_invariance),
        ("determinism", determinism),
    ];
    // Written to the stdout handle directly so the lines survive test
    // output capture.
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match &res {
            Ok(d) => {
                let _ = writeln!(out, "criterion {}: PASS {name} ({secs:.2}s): {d}", i + 1);
            }
            Err(e) => {
                let _ = writeln!(out, "criterion {}: FAIL {name} ({secs:.2}s): {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
