//! Executes the analysis requests of a scene.

use super::plot::{self, Overlays};
use super::report::{cone_json, num, sha256_hex, union_json, SCHEMA};
use super::scene::{Request, Scene};
use crate::error::{MonoError, Result};
use crate::monocheck::{
    hypo_modulus, isc_probe, monotone_witness, monotone_witness_tol, revalidate_extension, strong_modulus,
    type_a_witness_search, ProbeSettings, DEFAULT_ISC_RADII,
};
use crate::normgeom::{GraphPoint, NormSpec};
use crate::opmodel::{sample_graph, GraphBox, Operator};
use crate::resolvent::{
    localization_lipschitz, minty_local_probe, minty_sweep, resolvent_solve, revalidate_query, strong_inverse_probe,
    transvected_probe, LocalizationProbe,
};
use crate::vardiff::{
    limiting_coderivative, local_max_via_coderivative, psd_criterion, regular_coderivative, revalidate_coderivative,
    supremal_psd_sigma,
};
use crate::verdict::{Status, Verdict, Witness};
use serde_json::{json, Map, Value};
use std::time::Instant;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub tol: Option<f64>,
    /// Render an SVG for every one-dimensional request.
    pub plot: bool,
    /// Record wall-clock times (makes reports non-reproducible).
    pub timing: bool,
}

/// An SVG produced for one request.
#[derive(Clone, Debug)]
pub struct Plot {
    pub file: String,
    pub svg: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Value,
    pub plots: Vec<Plot>,
    /// Some request was INCONCLUSIVE or ended in an error.
    pub incomplete: bool,
}

/// Outcome of one request before it is written out.
struct Outcome {
    verdict: Option<Verdict>,
    result: Map<String, Value>,
    overlays: Overlays,
    revalidated: Option<bool>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome {
            verdict: None,
            result: Map::new(),
            overlays: Overlays::default(),
            revalidated: None,
        }
    }

    fn verdict(mut self, v: Verdict) -> Outcome {
        self.overlays.witness = v.witness.clone();
        self.verdict = Some(v);
        self
    }

    fn put(mut self, key: &str, v: Value) -> Outcome {
        self.result.insert(key.to_string(), v);
        self
    }
}

fn pair_on_graph(op: &Operator, w: &Witness, tol: f64) -> Result<bool> {
    match w {
        Witness::Pair { a, b, .. } | Witness::Modulus { a, b, .. } => {
            Ok(w.self_consistent(tol) && op.contains_pair(&a.x, &a.v, tol)? && op.contains_pair(&b.x, &b.v, tol)?)
        }
        _ => Ok(false),
    }
}

fn isc_holds(op: &Operator, pt: &GraphPoint, w: &Witness, tol: f64) -> Result<bool> {
    let Witness::Isc { x, epsilon, .. } = w else {
        return Ok(false);
    };
    Ok(op.value_at(x, tol)?.distance(&pt.v) > *epsilon)
}

fn probe_json(p: &LocalizationProbe) -> Value {
    json!({
        "image_center": p.image_center,
        "kappa": p.kappa,
        "lambda": p.lambda,
        "lipschitz": p.lipschitz.map(num),
        "queries": p.queries.len(),
        "radii": p.radii,
        "scale": p.scale,
        "single_valued": p.single_valued,
        "full_domain": p.full_domain,
    })
}

/// Revalidates a FAIL witness by its kind; `probe` gives `(κ, λ, spec)`
/// for query witnesses.
fn revalidate(
    op: &Operator,
    req: &Request,
    bx: &GraphBox,
    v: &Verdict,
    probe: Option<(f64, f64, NormSpec)>,
    tol: f64,
) -> Result<bool> {
    let Some(w) = &v.witness else {
        return Ok(false);
    };
    match w {
        Witness::Pair { .. } | Witness::Modulus { .. } => pair_on_graph(op, w, tol),
        Witness::Extension { .. } => revalidate_extension(op, bx, w, req.density, tol),
        Witness::Isc { .. } => isc_holds(op, &req.point, w, tol),
        Witness::Query { .. } => match probe {
            Some((kappa, lambda, spec)) => revalidate_query(op, w, kappa, lambda, &spec, bx),
            None => Ok(w.self_consistent(tol)),
        },
        Witness::Coderivative { .. } => revalidate_coderivative(op, w),
    }
}

/// `λ` of the first failing part of a sweep.
fn failing_lambda(v: &Verdict, lambdas: &[f64]) -> f64 {
    v.parts
        .iter()
        .find(|(_, p)| p.is_fail())
        .and_then(|(n, _)| n.strip_prefix("lambda=")?.parse().ok())
        .unwrap_or(lambdas[0])
}

fn execute(op: &Operator, req: &Request, spec: &NormSpec, bx: &GraphBox, opts: &RunOptions) -> Result<Outcome> {
    let tol = opts.tol.unwrap_or_else(|| bx.default_tol());
    let pt = &req.point;
    let d = req.density;
    let mut out = Outcome::new();
    let mut probe: Option<(f64, f64, NormSpec)> = None;
    out = match req.run.as_str() {
        "monotone_witness" => {
            let g = sample_graph(op, bx, d)?;
            let v = match opts.tol {
                Some(t) => monotone_witness_tol(&g, spec, t),
                None => monotone_witness(&g, spec),
            };
            out.verdict(v)
        }
        "strong_modulus" => {
            let g = sample_graph(op, bx, d)?;
            let e = strong_modulus(&g, spec)?;
            out.overlays.witness = Some(Witness::Pair {
                a: e.pair.0.clone(),
                b: e.pair.1.clone(),
                value: 0.0,
            });
            out.put("value", num(e.value)).put("pair", json!([e.pair.0, e.pair.1]))
        }
        "hypo_modulus" => {
            let g = sample_graph(op, bx, d)?;
            out.put("value", num(hypo_modulus(&g)?))
        }
        "isc_probe" => {
            let radii = req.radii.clone().unwrap_or(DEFAULT_ISC_RADII.to_vec());
            let settings = ProbeSettings {
                density: d,
                seed: opts.seed,
                tol: opts.tol,
            };
            out.verdict(isc_probe(op, pt, &radii, &settings)?)
        }
        "typeA_witness_search" => out.verdict(type_a_witness_search(op, pt, bx, d, opts.tol)?),
        "resolvent_solve" => {
            let lambda = req.lambdas[0];
            let s = resolvent_solve(op, lambda, req.y.as_ref().expect("checked while parsing"), spec, bx)?;
            out.put("solutions", json!(s.points))
                .put("continuum", json!(s.continuum))
                .put("exact", json!(s.exact))
                .put("lambda", num(lambda))
        }
        "minty_local_probe" if req.lambdas.len() > 1 => {
            let v = minty_sweep(op, pt, &req.lambdas, bx, d, opts.tol)?;
            probe = Some((1.0, failing_lambda(&v, &req.lambdas), spec.clone()));
            out.verdict(v)
        }
        "minty_local_probe" => {
            let (v, p) = minty_local_probe(op, pt, req.lambdas[0], bx, d, opts.tol)?;
            probe = Some((1.0, req.lambdas[0], spec.clone()));
            out.overlays.probe = Some(p.clone());
            out.verdict(v).put("probe", probe_json(&p))
        }
        "strong_inverse_probe" => {
            probe = Some((0.0, 1.0, spec.clone()));
            out.verdict(strong_inverse_probe(op, pt, bx, d, req.modulus, opts.tol)?)
        }
        "localization_lipschitz" => {
            let (v, p) = match req.sigma {
                Some(s) => {
                    probe = Some((s, 1.0, NormSpec::euclidean(op.dim())));
                    transvected_probe(op, pt, s, bx, d, opts.tol)?
                }
                None => {
                    probe = Some((1.0, req.lambdas[0], spec.clone()));
                    minty_local_probe(op, pt, req.lambdas[0], bx, d, opts.tol)?
                }
            };
            let l = match p.lipschitz {
                Some(l) => Ok(l),
                None => localization_lipschitz(&p),
            };
            out.overlays.probe = Some(p.clone());
            let out = out.verdict(v).put("probe", probe_json(&p));
            match l {
                Ok(l) => out.put("lipschitz", num(l)),
                Err(e) => out.put("lipschitz", Value::Null).put("note", json!(e.to_string())),
            }
        }
        "regular_coderivative" => out.put("cone", cone_json(&regular_coderivative(op, pt)?)),
        "limiting_coderivative" => out.put("cones", union_json(&limiting_coderivative(op, pt)?)),
        "psd_criterion" => out.verdict(psd_criterion(op, bx, req.sigma.unwrap_or(0.0), d)?),
        "local_max_via_coderivative" => out.verdict(local_max_via_coderivative(op, pt, bx, d, req.sigma.unwrap_or(0.0))?),
        "supremal_psd_sigma" => out.put("value", num(supremal_psd_sigma(op, bx, d)?)),
        other => return Err(MonoError::InvalidInput(format!("unknown analysis `{other}`"))),
    };
    if let Some(v) = &out.verdict {
        if v.is_fail() {
            out.revalidated = Some(revalidate(op, req, bx, v, probe, tol)?);
        }
    }
    Ok(out)
}

fn request_json(index: usize, req: &Request, bx: &GraphBox) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("index".into(), json!(index));
    m.insert("run".into(), json!(req.run));
    m.insert("op".into(), json!(req.op));
    m.insert("point".into(), json!(req.point));
    m.insert(
        "box".into(),
        json!({
            "x_center": bx.x_center,
            "x_radius": bx.x_radius,
            "v_center": bx.v_center,
            "v_radius": bx.v_radius,
        }),
    );
    m.insert("density".into(), json!(req.density));
    m
}

/// Runs every request in order. Failures of single requests are recorded
/// in the report and do not stop the run.
pub fn run_scene(scene: &Scene, opts: &RunOptions) -> RunOutput {
    let mut requests = Vec::new();
    let mut plots = Vec::new();
    let mut incomplete = false;
    let mut counts = [0usize; 4];
    for (i, req) in scene.requests.iter().enumerate() {
        let op = scene.operator(&req.op).expect("checked while parsing");
        let spec = scene.norm(op.dim());
        let bx = req.graph_box(&spec);
        let mut m = request_json(i, req, &bx);
        let start = Instant::now();
        match execute(op, req, &spec, &bx, opts) {
            Ok(mut o) => {
                if let Some(v) = &o.verdict {
                    m.insert("status".into(), json!(v.status.as_str()));
                    m.insert("verdict".into(), serde_json::to_value(v).expect("verdicts serialize"));
                    counts[match v.status {
                        Status::Pass => 0,
                        Status::Fail => 1,
                        Status::Inconclusive => 2,
                    }] += 1;
                    incomplete |= v.status == Status::Inconclusive;
                } else {
                    m.insert("status".into(), json!("DONE"));
                }
                if let Some(r) = o.revalidated {
                    m.insert("revalidated".into(), json!(r));
                }
                if !o.result.is_empty() {
                    m.insert("result".into(), Value::Object(std::mem::take(&mut o.result)));
                }
                if opts.plot {
                    o.overlays.point = Some(req.point.clone());
                    if let Some(s) = req.shear {
                        o.overlays.shear = Some((s, spec.clone()));
                    }
                    match plot::render(op, &bx, req.density, &o.overlays) {
                        Ok(svg) => {
                            let file = format!("request_{i:03}_{}.svg", req.run);
                            m.insert("plot".into(), json!(file));
                            plots.push(Plot { file, svg });
                        }
                        Err(e) => {
                            m.insert("plot_error".into(), json!({"code": e.code(), "message": e.to_string()}));
                        }
                    }
                }
            }
            Err(e) => {
                incomplete = true;
                counts[3] += 1;
                m.insert("status".into(), json!("ERROR"));
                m.insert("error".into(), json!({"code": e.code(), "message": e.to_string()}));
            }
        }
        if opts.timing {
            m.insert("wall_clock".into(), json!(start.elapsed().as_secs_f64()));
        }
        requests.push(Value::Object(m));
    }
    let mut report = json!({
        "schema": SCHEMA,
        "tool": {"name": "monolab", "version": env!("CARGO_PKG_VERSION")},
        "scene_hash": sha256_hex(&scene.to_text()),
        "seed": opts.seed,
        "requests": requests,
        "summary": {"pass": counts[0], "fail": counts[1], "inconclusive": counts[2], "error": counts[3]},
    });
    if let Some(t) = opts.tol {
        report["tol"] = json!(t);
    }
    RunOutput {
        report,
        plots,
        incomplete,
    }
}
