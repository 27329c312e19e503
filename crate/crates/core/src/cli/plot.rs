//! SVG rendering of one-dimensional graphs with analysis overlays.

use crate::error::{MonoError, Result};
use crate::normgeom::{duality_map, shear_vertical, GraphPoint, NormSpec};
use crate::opmodel::sample::{clipped_pieces, sample_graph};
use crate::opmodel::{GraphBox, Operator};
use crate::resolvent::LocalizationProbe;
use crate::verdict::Witness;
use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
pub const MARGIN: f64 = 40.0;

/// What to draw on top of the graph.
#[derive(Clone, Debug, Default)]
pub struct Overlays {
    pub point: Option<GraphPoint>,
    pub witness: Option<Witness>,
    /// Image of the graph under `(x, v) -> (x, v + σJ(x))`.
    pub shear: Option<(f64, NormSpec)>,
    pub probe: Option<LocalizationProbe>,
}

struct Frame {
    xlo: f64,
    xhi: f64,
    vlo: f64,
    vhi: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.xlo) / (self.xhi - self.xlo) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.vlo) / (self.vhi - self.vlo) * (HEIGHT - 2.0 * MARGIN)
    }

    fn at(&self, x: f64, v: f64) -> String {
        format!("{:.3},{:.3}", self.px(x), self.py(v))
    }
}

/// Orders the vertices of a convex polygon counterclockwise.
fn hull_order(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    pts
}

fn draw_shape(out: &mut String, f: &Frame, pts: Vec<Vec<f64>>, style: &str) {
    match pts.len() {
        0 => {}
        1 => {
            let _ = writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="3.000" {style}/>"#, f.px(pts[0][0]), f.py(pts[0][1]));
        }
        2 => {
            let _ = writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {style}/>"#,
                f.px(pts[0][0]),
                f.py(pts[0][1]),
                f.px(pts[1][0]),
                f.py(pts[1][1])
            );
        }
        _ => {
            let path: Vec<String> = hull_order(pts).iter().map(|p| f.at(p[0], p[1])).collect();
            let _ = writeln!(out, r#"<polygon points="{}" {style}/>"#, path.join(" "));
        }
    }
}

fn sheared(p: &[f64], sigma: f64, spec: &NormSpec) -> Vec<f64> {
    let g = GraphPoint { x: vec![p[0]], v: vec![p[1]] };
    match shear_vertical(&g, sigma, spec) {
        Ok(s) => vec![s.x[0], s.v[0]],
        Err(_) => p.to_vec(),
    }
}

/// Renders `gph op ∩ bx` for a one-dimensional operator.
pub fn render(op: &Operator, bx: &GraphBox, density: usize, ov: &Overlays) -> Result<String> {
    if op.dim() != 1 {
        return Err(MonoError::UnsupportedDimension(op.dim()));
    }
    let (xl, xh) = bx.x_cube();
    let (vl, vh) = bx.v_cube();
    let f = Frame {
        xlo: xl[0],
        xhi: xh[0],
        vlo: vl[0],
        vhi: vh[0],
    };
    // Polygons, segments or points of the graph inside the box.
    let mut shapes: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut dots: Vec<Vec<f64>> = Vec::new();
    if let Some((g, regions)) = op.local_graph() {
        for p in clipped_pieces(&g, &regions, bx) {
            if let Some(vr) = p.vrep() {
                shapes.push(vr.points_f64());
            }
        }
    } else {
        let g = sample_graph(op, bx, 8 * density.max(2))?;
        dots = g.points().iter().map(|p| vec![p.x[0], p.v[0]]).collect();
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{HEIGHT:.0}" viewBox="0 0 {WIDTH:.0} {HEIGHT:.0}">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="frame"><rect x="{MARGIN:.3}" y="{MARGIN:.3}" width="{:.3}" height="{:.3}"/></clipPath></defs>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{HEIGHT:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN:.3}" y="{MARGIN:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    if f.xlo < 0.0 && f.xhi > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{:.3}" y1="{MARGIN:.3}" x2="{:.3}" y2="{:.3}" stroke="#bbb"/>"##,
            f.px(0.0),
            f.px(0.0),
            HEIGHT - MARGIN
        );
    }
    if f.vlo < 0.0 && f.vhi > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#bbb"/>"##,
            f.py(0.0),
            WIDTH - MARGIN,
            f.py(0.0)
        );
    }
    for (txt, x, y) in [
        (format!("{:.3}", f.xlo), MARGIN, HEIGHT - MARGIN + 16.0),
        (format!("{:.3}", f.xhi), WIDTH - MARGIN - 40.0, HEIGHT - MARGIN + 16.0),
        (format!("{:.3}", f.vlo), 2.0, HEIGHT - MARGIN),
        (format!("{:.3}", f.vhi), 2.0, MARGIN + 4.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x:.3}" y="{y:.3}" font-size="12" font-family="monospace">{txt}</text>"#);
    }
    let _ = writeln!(s, r#"<g clip-path="url(#frame)">"#);

    let graph_style = r##"fill="#9ecae1" fill-opacity="0.6" stroke="#08519c" stroke-width="2""##;
    for sh in &shapes {
        draw_shape(&mut s, &f, sh.clone(), graph_style);
    }
    for d in &dots {
        let _ = writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="2.000" fill="#08519c"/>"##, f.px(d[0]), f.py(d[1]));
    }

    if let Some((sigma, spec)) = &ov.shear {
        let style = r##"fill="none" stroke="#31a354" stroke-width="2" stroke-dasharray="6 4""##;
        for sh in &shapes {
            draw_shape(&mut s, &f, sh.iter().map(|p| sheared(p, *sigma, spec)).collect(), style);
        }
        for d in &dots {
            let q = sheared(d, *sigma, spec);
            let _ = writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="2.000" fill="#31a354"/>"##, f.px(q[0]), f.py(q[1]));
        }
    }

    if let Some(p) = &ov.probe {
        let spec = &p.spec;
        for q in p.queries.iter().filter(|q| q.is_single()) {
            let x = &q.solutions[0];
            let jx = duality_map(x, spec).unwrap_or_else(|_| x.clone());
            let v = (q.y[0] - p.kappa * jx[0]) / p.lambda;
            let _ = writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="3.000" fill="#fd8d3c"/>"##, f.px(x[0]), f.py(v));
        }
    }

    if let Some(w) = &ov.witness {
        let mark = r##"fill="none" stroke="#de2d26" stroke-width="2""##;
        match w {
            Witness::Pair { a, b, .. } | Witness::Modulus { a, b, .. } => {
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#de2d26" stroke-dasharray="4 3"/>"##,
                    f.px(a.x[0]),
                    f.py(a.v[0]),
                    f.px(b.x[0]),
                    f.py(b.v[0])
                );
                for p in [a, b] {
                    let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="5.000" {mark}/>"#, f.px(p.x[0]), f.py(p.v[0]));
                }
            }
            Witness::Extension { point, .. } => {
                let (cx, cy) = (f.px(point.x[0]), f.py(point.v[0]));
                let _ = writeln!(
                    s,
                    r#"<path d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" {mark}/>"#,
                    cx - 6.0,
                    cy - 6.0,
                    cx + 6.0,
                    cy + 6.0,
                    cx - 6.0,
                    cy + 6.0,
                    cx + 6.0,
                    cy - 6.0
                );
            }
            Witness::Isc { x, .. } => {
                let _ = writeln!(
                    s,
                    r##"<line x1="{:.3}" y1="{MARGIN:.3}" x2="{:.3}" y2="{:.3}" stroke="#de2d26" stroke-dasharray="4 3"/>"##,
                    f.px(x[0]),
                    f.px(x[0]),
                    HEIGHT - MARGIN
                );
            }
            Witness::Query { solutions, .. } => {
                for x in solutions {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.3}" y="{:.3}" width="6.000" height="6.000" {mark}/>"#,
                        f.px(x[0]) - 3.0,
                        HEIGHT - MARGIN - 3.0
                    );
                }
            }
            Witness::Coderivative { u, v, w, z, .. } => {
                // (w, z) in D*T(u|v) is the normal (z, -w) to the graph.
                let (cx, cy) = (f.px(u[0]), f.py(v[0]));
                let len = (z[0] * z[0] + w[0] * w[0]).sqrt().max(f64::MIN_POSITIVE);
                let (dx, dy) = (40.0 * z[0] / len, 40.0 * w[0] / len);
                let _ = writeln!(s, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="5.000" {mark}/>"#);
                let _ = writeln!(
                    s,
                    r#"<line x1="{cx:.3}" y1="{cy:.3}" x2="{:.3}" y2="{:.3}" {mark}/>"#,
                    cx + dx,
                    cy + dy
                );
            }
        }
    }

    if let Some(p) = &ov.point {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="4.000" fill="black"/>"#, f.px(p.x[0]), f.py(p.v[0]));
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
