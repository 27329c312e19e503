use crate::error::{check_dim, MonoError, Result};
use crate::normgeom::{GraphPoint, NormSpec};
use serde::{Deserialize, Serialize};

/// A neighborhood `U x V` of the graph space: closed balls around `x_center`
/// (primal norm) and `v_center` (dual norm).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphBox {
    pub x_center: Vec<f64>,
    pub x_radius: f64,
    pub v_center: Vec<f64>,
    pub v_radius: f64,
    pub norm: NormSpec,
}

const EDGE_SLACK: f64 = 1e-12;

impl GraphBox {
    pub fn new(x_center: Vec<f64>, x_radius: f64, v_center: Vec<f64>, v_radius: f64) -> Result<GraphBox> {
        let n = x_center.len();
        GraphBox {
            x_center,
            x_radius,
            v_center,
            v_radius,
            norm: NormSpec::euclidean(n),
        }
        .validated()
    }

    pub fn around(pt: &GraphPoint, radius: f64) -> Result<GraphBox> {
        GraphBox::new(pt.x.clone(), radius, pt.v.clone(), radius)
    }

    pub fn with_norm(mut self, norm: NormSpec) -> Result<GraphBox> {
        self.norm = norm;
        self.validated()
    }

    fn validated(self) -> Result<GraphBox> {
        check_dim(self.x_center.len(), self.v_center.len())?;
        self.norm.check(self.x_center.len())?;
        for r in [self.x_radius, self.v_radius] {
            if !(r.is_finite() && r > 0.0) {
                return Err(MonoError::InvalidInput(format!("box radius {r} must be positive")));
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.x_center.len()
    }

    pub fn center(&self) -> GraphPoint {
        GraphPoint {
            x: self.x_center.clone(),
            v: self.v_center.clone(),
        }
    }

    pub fn contains_x(&self, x: &[f64], slack: f64) -> bool {
        self.norm.dist(x, &self.x_center) <= self.x_radius * (1.0 + EDGE_SLACK) + slack
    }

    pub fn contains_v(&self, v: &[f64], slack: f64) -> bool {
        self.norm.dual_dist(v, &self.v_center) <= self.v_radius * (1.0 + EDGE_SLACK) + slack
    }

    pub fn contains(&self, pt: &GraphPoint, slack: f64) -> bool {
        self.contains_x(&pt.x, slack) && self.contains_v(&pt.v, slack)
    }

    /// Strictly inside both balls shrunk by `frac`.
    pub fn holds_interior(&self, pt: &GraphPoint, frac: f64) -> bool {
        self.norm.dist(&pt.x, &self.x_center) < frac * self.x_radius
            && self.norm.dual_dist(&pt.v, &self.v_center) < frac * self.v_radius
    }

    pub fn scaled(&self, f: f64) -> GraphBox {
        GraphBox {
            x_radius: self.x_radius * f,
            v_radius: self.v_radius * f,
            ..self.clone()
        }
    }

    fn primal_halfwidths(&self, r: f64) -> Vec<f64> {
        let p = self.norm.p();
        self.norm.weights().iter().map(|w| r / w.powf(1.0 / p)).collect()
    }

    fn dual_halfwidths(&self, r: f64) -> Vec<f64> {
        let q = self.norm.q();
        self.norm
            .weights()
            .iter()
            .map(|w| r / w.powf(1.0 - q).powf(1.0 / q))
            .collect()
    }

    /// Smallest coordinate box containing the primal ball.
    pub fn x_cube(&self) -> (Vec<f64>, Vec<f64>) {
        cube(&self.x_center, &self.primal_halfwidths(self.x_radius))
    }

    pub fn v_cube(&self) -> (Vec<f64>, Vec<f64>) {
        cube(&self.v_center, &self.dual_halfwidths(self.v_radius))
    }

    /// Coordinate boxes inscribed in the two balls.
    pub fn inscribed_cubes(&self) -> ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
        let sw: f64 = self.norm.weights().iter().sum();
        let hx = self.x_radius / sw.powf(1.0 / self.norm.p());
        let q = self.norm.q();
        let swd: f64 = self.norm.weights().iter().map(|w| w.powf(1.0 - q)).sum();
        let hv = self.v_radius / swd.powf(1.0 / q);
        let n = self.dim();
        (
            cube(&self.x_center, &vec![hx; n]),
            cube(&self.v_center, &vec![hv; n]),
        )
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.x_radius.max(self.v_radius)
    }

    /// Default comparison tolerance, scaled to the box.
    pub fn default_tol(&self) -> f64 {
        1e-9 * self.diameter().max(1.0).powi(2)
    }

    /// Grid of `density` points per axis over the primal cube, plus the
    /// center, restricted to the primal ball; sorted.
    pub fn x_grid(&self, density: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.x_cube();
        let mut out = grid(&lo, &hi, density);
        out.push(self.x_center.clone());
        out.retain(|x| self.contains_x(x, 0.0));
        sort_dedup_f64(out)
    }

    /// Same construction in the dual ball.
    pub fn v_grid(&self, density: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.v_cube();
        let mut out = grid(&lo, &hi, density);
        out.push(self.v_center.clone());
        out.retain(|v| self.contains_v(v, 0.0));
        sort_dedup_f64(out)
    }
}

fn cube(c: &[f64], h: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        c.iter().zip(h).map(|(c, h)| c - h).collect(),
        c.iter().zip(h).map(|(c, h)| c + h).collect(),
    )
}

/// Tensor grid with `density` points per axis, endpoints included.
pub fn grid(lo: &[f64], hi: &[f64], density: usize) -> Vec<Vec<f64>> {
    let density = density.max(2);
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| {
            (0..density)
                .map(|k| {
                    let t = k as f64 / (density - 1) as f64;
                    if k == density - 1 {
                        *b
                    } else {
                        a + (b - a) * t
                    }
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for ax in &axes {
        let mut next = Vec::with_capacity(out.len() * ax.len());
        for p in &out {
            for v in ax {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn sort_dedup_f64(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| cmp_f64_vec(a, b));
    v.dedup();
    v
}

pub(crate) fn cmp_f64_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}
