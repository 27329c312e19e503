//! Weighted p-norms on R^n, their duality maps, and the two shears of the
//! graph space used to move between operators and their resolvents.

use crate::error::{check_dim, MonoError, Result};
use serde::{Deserialize, Serialize};

/// `||x|| = (sum_i w_i |x_i|^p)^(1/p)` with `1 < p < inf` and positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    p: f64,
    weights: Vec<f64>,
}

/// A point `(x, v)` of the graph space `X x X*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl GraphPoint {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<GraphPoint> {
        check_dim(x.len(), v.len())?;
        Ok(GraphPoint { x, v })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Concatenated coordinates `(x, v)`.
    pub fn stacked(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.v);
        z
    }

    pub fn from_stacked(z: &[f64]) -> GraphPoint {
        let n = z.len() / 2;
        GraphPoint {
            x: z[..n].to_vec(),
            v: z[n..].to_vec(),
        }
    }
}

impl NormSpec {
    pub fn new(p: f64, weights: Vec<f64>) -> Result<NormSpec> {
        if !(p.is_finite() && p > 1.0) {
            return Err(MonoError::InvalidInput(format!("exponent p = {p} must satisfy 1 < p < inf")));
        }
        if weights.is_empty() {
            return Err(MonoError::InvalidInput("at least one weight is required".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(MonoError::InvalidInput(format!("weight {w} must be positive")));
        }
        Ok(NormSpec { p, weights })
    }

    pub fn euclidean(n: usize) -> NormSpec {
        NormSpec {
            p: 2.0,
            weights: vec![1.0; n],
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn is_euclidean(&self) -> bool {
        self.p == 2.0 && self.weights.iter().all(|w| *w == 1.0)
    }

    /// Whether the norm comes from an inner product (`p = 2`), in which case
    /// the duality map is the linear map `diag(w)`.
    pub fn is_hilbertian(&self) -> bool {
        self.p == 2.0
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        weighted_pnorm(x, self.p, self.weights.iter().copied())
    }

    pub fn dual_norm(&self, y: &[f64]) -> f64 {
        let e = 1.0 - self.q();
        weighted_pnorm(y, self.q(), self.weights.iter().map(|w| w.powf(e)))
    }

    /// Distance `||a - b||`.
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.norm(&d)
    }

    pub fn dual_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.dual_norm(&d)
    }

    /// Graph-space norm `max(||x||, ||v||_*)`.
    pub fn graph_norm(&self, x: &[f64], v: &[f64]) -> f64 {
        self.norm(x).max(self.dual_norm(v))
    }

    pub fn check(&self, n: usize) -> Result<()> {
        check_dim(self.dim(), n)
    }
}

fn weighted_pnorm(x: &[f64], p: f64, w: impl Iterator<Item = f64>) -> f64 {
    // Scale by the largest entry to keep |x|^p in range.
    let m = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().zip(w).map(|(xi, wi)| wi * (xi.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclid(a: &[f64]) -> f64 {
    inner(a, a).sqrt()
}

/// `J(x)_i = ||x||^(2-p) w_i |x_i|^(p-1) sign(x_i)`, the gradient of `||x||^2 / 2`.
pub fn duality_map(x: &[f64], spec: &NormSpec) -> Result<Vec<f64>> {
    spec.check(x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(MonoError::InvalidInput("non-finite coordinate".into()));
    }
    let nx = spec.norm(x);
    if nx == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let p = spec.p;
    Ok(x.iter()
        .zip(&spec.weights)
        .map(|(xi, wi)| {
            // ||x||^(2-p) |x_i|^(p-1) = ||x|| (|x_i| / ||x||)^(p-1)
            nx * wi * (xi.abs() / nx).powf(p - 1.0) * xi.signum()
        })
        .collect())
}

/// `(x, v) -> (x, v + sigma J(x))`.
pub fn shear_vertical(pt: &GraphPoint, sigma: f64, spec: &NormSpec) -> Result<GraphPoint> {
    let j = duality_map(&pt.x, spec)?;
    check_dim(pt.x.len(), pt.v.len())?;
    Ok(GraphPoint {
        x: pt.x.clone(),
        v: pt.v.iter().zip(&j).map(|(v, j)| v + sigma * j).collect(),
    })
}

/// Euclidean transvection `(x, v) -> (v + sigma x, x)`; it maps the graph of
/// `T` onto the graph of `(T + sigma I)^(-1)`.
pub fn shear_transvect(pt: &GraphPoint, sigma: f64) -> GraphPoint {
    GraphPoint {
        x: pt.v.iter().zip(&pt.x).map(|(v, x)| v + sigma * x).collect(),
        v: pt.x.clone(),
    }
}

/// As [`shear_transvect`], refusing norms that are not Euclidean.
pub fn shear_transvect_in(pt: &GraphPoint, sigma: f64, spec: &NormSpec) -> Result<GraphPoint> {
    if !spec.is_euclidean() {
        return Err(MonoError::InvalidInput(
            "the transvection is only defined for the Euclidean norm".into(),
        ));
    }
    check_dim(pt.x.len(), pt.v.len())?;
    Ok(shear_transvect(pt, sigma))
}

/// Inverse transvection `(u, x) -> (x, u - sigma x)`.
pub fn shear_transvect_inverse(pt: &GraphPoint, sigma: f64) -> Result<GraphPoint> {
    if sigma == 0.0 {
        return Err(MonoError::InvalidInput("sigma must be nonzero".into()));
    }
    check_dim(pt.x.len(), pt.v.len())?;
    Ok(GraphPoint {
        x: pt.v.clone(),
        v: pt.x.iter().zip(&pt.v).map(|(u, x)| u - sigma * x).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_sq(spec: &NormSpec, x: &[f64]) -> f64 {
        0.5 * spec.norm(x).powi(2)
    }

    fn fd_gradient(spec: &NormSpec, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|i| {
                let mut a = x.to_vec();
                let mut b = x.to_vec();
                a[i] += h;
                b[i] -= h;
                (half_sq(spec, &a) - half_sq(spec, &b)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn p3_on_diagonal() {
        let spec = NormSpec::new(3.0, vec![1.0, 1.0]).unwrap();
        let j = duality_map(&[1.0, 1.0], &spec).unwrap();
        let expect = 2f64.powf(-1.0 / 3.0);
        for c in &j {
            assert!((c - expect).abs() < 1e-12);
        }
        let fd = fd_gradient(&spec, &[1.0, 1.0]);
        for (a, b) in j.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn euclidean_is_identity() {
        let spec = NormSpec::euclidean(3);
        assert_eq!(duality_map(&[1.5, -2.0, 0.0], &spec).unwrap(), vec![1.5, -2.0, 0.0]);
        assert_eq!(duality_map(&[0.0, 0.0, 0.0], &spec).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(NormSpec::new(1.0, vec![1.0]).is_err());
        assert!(NormSpec::new(f64::INFINITY, vec![1.0]).is_err());
        assert!(NormSpec::new(2.0, vec![1.0, 0.0]).is_err());
        let spec = NormSpec::euclidean(2);
        assert!(matches!(
            duality_map(&[1.0], &spec),
            Err(MonoError::DimensionMismatch { .. })
        ));
        let p3 = NormSpec::new(3.0, vec![1.0, 1.0]).unwrap();
        let pt = GraphPoint::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(shear_transvect_in(&pt, 1.0, &p3).is_err());
        assert!(shear_transvect_inverse(&pt, 0.0).is_err());
    }

    #[test]
    fn shears_round_trip() {
        let pt = GraphPoint::new(vec![1.0, -2.0], vec![0.5, 3.0]).unwrap();
        let t = shear_transvect(&pt, 0.7);
        assert_eq!(t.v, pt.x);
        let back = shear_transvect_inverse(&t, 0.7).unwrap();
        for (a, b) in back.stacked().iter().zip(pt.stacked()) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = shear_vertical(&pt, 2.0, &NormSpec::euclidean(2)).unwrap();
        assert_eq!(s.v, vec![2.5, -1.0]);
    }

    fn spec_strategy() -> impl Strategy<Value = NormSpec> {
        (1.2f64..6.0, prop::collection::vec(0.25f64..4.0, 3))
            .prop_map(|(p, w)| NormSpec::new(p, w).unwrap())
    }

    proptest! {
        #[test]
        fn pairing_and_dual_norm(spec in spec_strategy(), x in prop::collection::vec(-5.0f64..5.0, 3)) {
            let j = duality_map(&x, &spec).unwrap();
            let nx = spec.norm(&x);
            prop_assert!((inner(&j, &x) - nx * nx).abs() <= 1e-9 * (1.0 + nx * nx));
            prop_assert!((spec.dual_norm(&j) - nx).abs() <= 1e-9 * (1.0 + nx));
        }

        #[test]
        fn matches_finite_differences(spec in spec_strategy(), x in prop::collection::vec(0.2f64..3.0, 3), s in prop::collection::vec(prop::bool::ANY, 3)) {
            let x: Vec<f64> = x.iter().zip(&s).map(|(v, neg)| if *neg { -v } else { *v }).collect();
            let j = duality_map(&x, &spec).unwrap();
            let fd = fd_gradient(&spec, &x);
            for (a, b) in j.iter().zip(&fd) {
                prop_assert!((a - b).abs() <= 1e-5 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn homogeneous_of_degree_one(spec in spec_strategy(), x in prop::collection::vec(-5.0f64..5.0, 3), t in 0.1f64..10.0) {
            let j = duality_map(&x, &spec).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            let jt = duality_map(&tx, &spec).unwrap();
            for (a, b) in j.iter().zip(&jt) {
                prop_assert!((a * t - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
    }
}
