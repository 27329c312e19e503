//! Analysis outcomes.

use crate::error::{MonoError, Result};
use crate::normgeom::{inner, GraphPoint};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Evidence attached to a FAIL.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two graph points with `<v1 - v2, x1 - x2> = value < 0` (after any
    /// shift recorded in the verdict).
    Pair { a: GraphPoint, b: GraphPoint, value: f64 },
    /// A point outside the graph that is monotonically related to every
    /// sampled graph point; `margin` is the smallest pairing found.
    Extension { point: GraphPoint, margin: f64 },
    /// A primal point near the reference whose value set stays `distance`
    /// away from the reference value.
    Isc { x: Vec<f64>, distance: f64, epsilon: f64 },
    /// A probe query with zero or several solutions.
    Query {
        y: Vec<f64>,
        solutions: Vec<Vec<f64>>,
        continuum: bool,
    },
    /// `(w, z)` in the limiting coderivative at `(u, v)` with
    /// `<z, w> - sigma |w|^2 = value < 0`.
    Coderivative {
        u: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
        z: Vec<f64>,
        sigma: f64,
        value: f64,
    },
    /// A sampled pair whose strong-monotonicity ratio is below `required`.
    Modulus {
        a: GraphPoint,
        b: GraphPoint,
        ratio: f64,
        required: f64,
    },
}

impl Witness {
    /// Recomputes the defining inequality from the stored numbers alone.
    pub fn self_consistent(&self, tol: f64) -> bool {
        match self {
            Witness::Pair { a, b, value } => {
                let dv: Vec<f64> = a.v.iter().zip(&b.v).map(|(p, q)| p - q).collect();
                let dx: Vec<f64> = a.x.iter().zip(&b.x).map(|(p, q)| p - q).collect();
                let ip = inner(&dv, &dx);
                ip < -tol && (ip - value).abs() <= 1e-9 * (1.0 + value.abs())
            }
            Witness::Extension { margin, .. } => *margin >= -tol,
            Witness::Isc { distance, epsilon, .. } => distance > epsilon,
            Witness::Query { solutions, continuum, .. } => *continuum || solutions.len() != 1,
            Witness::Coderivative { w, z, sigma, value, .. } => {
                let q = inner(z, w) - sigma * inner(w, w);
                q < -tol && (q - value).abs() <= 1e-9 * (1.0 + value.abs())
            }
            Witness::Modulus { ratio, required, .. } => ratio < required,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Moduli {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell_hat: Option<f64>,
}

/// Sampling parameters an outcome was obtained at.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Radii (or box scale factors) that were tried, in order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<f64>,
    /// Whether a PASS is exact rather than limited by the sampling.
    pub exact: bool,
}

impl Resolution {
    pub fn new(tol: f64) -> Resolution {
        Resolution {
            tol,
            ..Default::default()
        }
    }

    pub fn density(mut self, d: usize) -> Self {
        self.density = Some(d);
        self
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }

    pub fn radii(mut self, r: Vec<f64>) -> Self {
        self.radii = r;
        self
    }

    pub fn exact(mut self, e: bool) -> Self {
        self.exact = e;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub moduli: Moduli,
    pub resolution: Resolution,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Named sub-verdicts the outcome was assembled from.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<(String, Verdict)>,
}

impl Verdict {
    pub fn pass(resolution: Resolution) -> Verdict {
        Verdict {
            status: Status::Pass,
            witness: None,
            moduli: Moduli::default(),
            resolution,
            notes: Vec::new(),
            parts: Vec::new(),
        }
    }

    pub fn fail(witness: Witness, resolution: Resolution) -> Verdict {
        Verdict {
            status: Status::Fail,
            witness: Some(witness),
            ..Verdict::pass(resolution)
        }
    }

    pub fn inconclusive(resolution: Resolution, note: impl Into<String>) -> Verdict {
        Verdict {
            status: Status::Inconclusive,
            notes: vec![note.into()],
            ..Verdict::pass(resolution)
        }
    }

    /// Maps an error raised during an analysis to an INCONCLUSIVE outcome
    /// when it reflects a resolution limit, and passes it on otherwise.
    pub fn from_limit(e: MonoError, resolution: Resolution) -> Result<Verdict> {
        match e {
            MonoError::SolverLimit { finest } => Ok(Verdict::inconclusive(
                resolution,
                format!("solver limit at grid spacing {finest:e}"),
            )),
            e => Err(e),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.notes.push(note.into());
        self
    }

    pub fn with_part(mut self, name: impl Into<String>, v: Verdict) -> Verdict {
        self.parts.push((name.into(), v));
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn part(&self, name: &str) -> Option<&Verdict> {
        self.parts.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}
