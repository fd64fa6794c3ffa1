//! The five embedding geometries behind a single unconstrained parametrization.
//!
//! Every point is a free vector `u` of length `d`:
//!
//! - Euclidean and L1 use `u` directly.
//! - Hyperboloid lifts `u` to `(sqrt(1 + |u|^2), u)` on the Minkowski hyperboloid.
//! - HilbertSimplex and FunkSimplex map `u` to `softmax(u)` on the simplex.
//!   The Hilbert distance there equals the variation seminorm of `u - w`, which
//!   is what we evaluate.
//!
//! Gradients are analytic. Where the distance is not differentiable (argmax
//! ties, coincident points) a subgradient is returned, breaking ties toward the
//! lowest index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{self, SimplexPoint};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Euclidean,
    L1,
    Hyperboloid,
    #[serde(rename = "hilbert")]
    HilbertSimplex,
    #[serde(rename = "funk")]
    FunkSimplex,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 5] = [
        ManifoldKind::Euclidean,
        ManifoldKind::L1,
        ManifoldKind::Hyperboloid,
        ManifoldKind::HilbertSimplex,
        ManifoldKind::FunkSimplex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Euclidean => "euclidean",
            ManifoldKind::L1 => "l1",
            ManifoldKind::Hyperboloid => "hyperboloid",
            ManifoldKind::HilbertSimplex => "hilbert",
            ManifoldKind::FunkSimplex => "funk",
        }
    }

    pub fn is_symmetric(self) -> bool {
        self != ManifoldKind::FunkSimplex
    }

    /// Distance between raw parameter slices of equal length. No validation.
    pub fn distance(self, u: &[f64], w: &[f64]) -> f64 {
        match self {
            ManifoldKind::Euclidean => u
                .iter()
                .zip(w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            ManifoldKind::L1 => u.iter().zip(w).map(|(a, b)| (a - b).abs()).sum(),
            ManifoldKind::Hyperboloid => hyperboloid_parts(u, w).dist,
            ManifoldKind::HilbertSimplex => {
                let (imax, imin) = diff_extremes(u, w);
                (u[imax] - w[imax]) - (u[imin] - w[imin])
            }
            ManifoldKind::FunkSimplex => {
                let (imax, _) = diff_extremes(u, w);
                let d = (u[imax] - w[imax]) - geometry::log_sum_exp(u) + geometry::log_sum_exp(w);
                d.max(0.0)
            }
        }
    }

    /// Distance plus its gradient, accumulated as `grad_u += scale * d/du` and
    /// `grad_w += scale * d/dw`. Returns the distance.
    pub fn distance_grad_acc(
        self,
        u: &[f64],
        w: &[f64],
        scale: f64,
        grad_u: &mut [f64],
        grad_w: &mut [f64],
    ) -> f64 {
        match self {
            ManifoldKind::Euclidean => {
                let dist = self.distance(u, w);
                if dist > 0.0 {
                    let s = scale / dist;
                    for k in 0..u.len() {
                        let g = s * (u[k] - w[k]);
                        grad_u[k] += g;
                        grad_w[k] -= g;
                    }
                }
                dist
            }
            ManifoldKind::L1 => {
                let mut dist = 0.0;
                for k in 0..u.len() {
                    let diff = u[k] - w[k];
                    dist += diff.abs();
                    let g = if diff > 0.0 {
                        scale
                    } else if diff < 0.0 {
                        -scale
                    } else {
                        0.0
                    };
                    grad_u[k] += g;
                    grad_w[k] -= g;
                }
                dist
            }
            ManifoldKind::Hyperboloid => {
                let parts = hyperboloid_parts(u, w);
                if parts.sq_chord > 0.0 {
                    // d/du arccosh(B) with B = x0 y0 - <u, w> and B^2 - 1 = m (1 + m / 4).
                    let m = parts.sq_chord;
                    let s = scale / (m * (1.0 + 0.25 * m)).sqrt();
                    let (x0, y0) = (parts.x0, parts.y0);
                    for k in 0..u.len() {
                        grad_u[k] += s * (y0 * u[k] / x0 - w[k]);
                        grad_w[k] += s * (x0 * w[k] / y0 - u[k]);
                    }
                }
                parts.dist
            }
            ManifoldKind::HilbertSimplex => {
                let (imax, imin) = diff_extremes(u, w);
                let dist = (u[imax] - w[imax]) - (u[imin] - w[imin]);
                if imax != imin {
                    grad_u[imax] += scale;
                    grad_u[imin] -= scale;
                    grad_w[imax] -= scale;
                    grad_w[imin] += scale;
                }
                dist
            }
            ManifoldKind::FunkSimplex => {
                let (imax, _) = diff_extremes(u, w);
                let dist = (u[imax] - w[imax]) - geometry::log_sum_exp(u) + geometry::log_sum_exp(w);
                let su = geometry::softmax(u);
                let sw = geometry::softmax(w);
                grad_u[imax] += scale;
                grad_w[imax] -= scale;
                for k in 0..u.len() {
                    grad_u[k] -= scale * su[k];
                    grad_w[k] += scale * sw[k];
                }
                dist.max(0.0)
            }
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" | "euclid" => Ok(ManifoldKind::Euclidean),
            "l1" => Ok(ManifoldKind::L1),
            "hyperboloid" | "hyperbolic" | "poincare" => Ok(ManifoldKind::Hyperboloid),
            "hilbert" | "hilbertsimplex" => Ok(ManifoldKind::HilbertSimplex),
            "funk" | "funksimplex" => Ok(ManifoldKind::FunkSimplex),
            other => Err(Error::InvalidParameter(format!(
                "unknown manifold kind {other:?} (expected euclidean, l1, hyperboloid, hilbert or funk)"
            ))),
        }
    }
}

/// Indices of the max and min of `u - w`, lowest index on ties.
fn diff_extremes(u: &[f64], w: &[f64]) -> (usize, usize) {
    let mut imax = 0;
    let mut imin = 0;
    let mut vmax = u[0] - w[0];
    let mut vmin = vmax;
    for k in 1..u.len() {
        let v = u[k] - w[k];
        if v > vmax {
            vmax = v;
            imax = k;
        }
        if v < vmin {
            vmin = v;
            imin = k;
        }
    }
    (imax, imin)
}

struct HyperboloidParts {
    x0: f64,
    y0: f64,
    /// Minkowski squared norm of `x - y`, equal to `2 (B - 1)`.
    sq_chord: f64,
    dist: f64,
}

fn hyperboloid_parts(u: &[f64], w: &[f64]) -> HyperboloidParts {
    let nu: f64 = u.iter().map(|a| a * a).sum();
    let nw: f64 = w.iter().map(|a| a * a).sum();
    let x0 = (1.0 + nu).sqrt();
    let y0 = (1.0 + nw).sqrt();
    let dx0 = (nu - nw) / (x0 + y0);
    let spatial: f64 = u.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
    let sq_chord = (spatial - dx0 * dx0).max(0.0);
    // arccosh(1 + m / 2) = 2 asinh(sqrt(m) / 2)
    let dist = 2.0 * (0.5 * sq_chord.sqrt()).asinh();
    HyperboloidParts {
        x0,
        y0,
        sq_chord,
        dist,
    }
}

/// Lorentz inner product `-x_0 y_0 + sum_i x_i y_i`.
pub fn lorentz_inner(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// A free parameter vector, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientParam(Vec<f64>);

impl AmbientParam {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(AmbientParam(u))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_dims(u: &AmbientParam, w: &AmbientParam) -> Result<()> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: w.len(),
        });
    }
    Ok(())
}

pub fn manifold_distance(kind: ManifoldKind, u: &AmbientParam, w: &AmbientParam) -> Result<f64> {
    check_dims(u, w)?;
    Ok(kind.distance(u.as_slice(), w.as_slice()))
}

/// Gradients of `manifold_distance(kind, u, w)` with respect to `u` and `w`.
pub fn manifold_distance_grad(
    kind: ManifoldKind,
    u: &AmbientParam,
    w: &AmbientParam,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(u, w)?;
    let mut gu = vec![0.0; u.len()];
    let mut gw = vec![0.0; w.len()];
    kind.distance_grad_acc(u.as_slice(), w.as_slice(), 1.0, &mut gu, &mut gw);
    Ok((gu, gw))
}

/// Where a parameter vector lives in its model space.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldPoint {
    Vector(Vec<f64>),
    Simplex(SimplexPoint),
    /// `(x_0, x_1, ..., x_d)` with `<x, x>_L = -1`, `x_0 > 0`.
    Hyperboloid(Vec<f64>),
}

pub fn to_manifold_point(kind: ManifoldKind, u: &AmbientParam) -> Result<ManifoldPoint> {
    let u = u.as_slice();
    Ok(match kind {
        ManifoldKind::Euclidean | ManifoldKind::L1 => ManifoldPoint::Vector(u.to_vec()),
        ManifoldKind::Hyperboloid => {
            let mut x = Vec::with_capacity(u.len() + 1);
            x.push((1.0 + u.iter().map(|a| a * a).sum::<f64>()).sqrt());
            x.extend_from_slice(u);
            ManifoldPoint::Hyperboloid(x)
        }
        ManifoldKind::HilbertSimplex | ManifoldKind::FunkSimplex => {
            ManifoldPoint::Simplex(geometry::softmax_point(u)?)
        }
    })
}
