//! Native hyperbolic disk coordinates (curvature -1) and pairwise geodesics.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A node position in the native representation of the hyperbolic disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    /// Builds a point; `theta` is reduced into `[0, 2π)`.
    ///
    /// Panics if `r` is negative or not finite.
    pub fn new(r: f64, theta: f64) -> Self {
        assert!(
            r.is_finite() && r >= 0.0,
            "radius must be finite and >= 0, got {r}"
        );
        assert!(theta.is_finite(), "angle must be finite");
        Self {
            r,
            theta: reduce_angle(theta),
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_radius(self, r: f64) -> Self {
        Self::new(r, self.theta)
    }
}

/// Angular separation in `[0, π]`.
pub fn angular_separation(theta1: f64, theta2: f64) -> f64 {
    let diff = (reduce_angle(theta1) - reduce_angle(theta2)).abs();
    PI - (PI - diff).abs()
}

/// Hyperbolic distance between two points of the native disk.
///
/// Evaluates `acosh(cosh r1 cosh r2 - sinh r1 sinh r2 cos Δθ)` through the
/// equivalent half-angle form
/// `2 asinh sqrt(sinh²((r1-r2)/2) + sinh r1 sinh r2 sin²(Δθ/2))`,
/// whose terms are all nonnegative, so nearby points at large radii do not
/// lose their distance to cancellation. The radicand is clamped at zero,
/// which is the `acosh` argument clamp at 1 in the other form.
pub fn hyperbolic_distance(p: &PolarPoint, q: &PolarPoint) -> f64 {
    let dtheta = angular_separation(p.theta, q.theta);
    let radial = ((p.r - q.r) / 2.0).sinh();
    let half = (dtheta / 2.0).sin();
    let s = radial * radial + p.r.sinh() * q.r.sinh() * half * half;
    2.0 * s.max(0.0).sqrt().asinh()
}

/// Symmetric matrix of pairwise hyperbolic distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicMatrix {
    n: usize,
    d: Vec<f64>,
}

impl GeodesicMatrix {
    /// Builds a matrix from row-major data. Returns `None` when the data is
    /// not an `n×n` symmetric matrix with zero diagonal and nonnegative entries.
    pub fn from_row_major(n: usize, d: Vec<f64>) -> Option<Self> {
        if d.len() != n * n {
            return None;
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return None;
            }
            for j in 0..i {
                let a = d[i * n + j];
                if a.is_nan() || a < 0.0 || a != d[j * n + i] {
                    return None;
                }
            }
        }
        Some(Self { n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    /// Restricts the matrix to the given nodes, in the given order.
    pub fn submatrix(&self, nodes: &[usize]) -> Self {
        let k = nodes.len();
        let mut d = Vec::with_capacity(k * k);
        for &a in nodes {
            for &b in nodes {
                d.push(self.get(a, b));
            }
        }
        Self { n: k, d }
    }
}

/// Pairwise geodesics over a coordinate set.
pub fn geodesic_matrix(coords: &[PolarPoint]) -> GeodesicMatrix {
    let n = coords.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = hyperbolic_distance(&coords[i], &coords[j]);
            d[i * n + j] = x;
            d[j * n + i] = x;
        }
    }
    GeodesicMatrix { n, d }
}
