//! Growing hyperbolic random graphs: PSO (`C = 0`) and nPSO (`C >= 1`).
//!
//! Node `t = 1..N` is born at radius `r_t = 2 ln t`; at each birth every older
//! node `s` fades outwards to `β r_s + (1-β) r_t` with `β = 1/(γ-1)`, where
//! `r_s` is its birth radius. The newcomer links to `m` older nodes: all of
//! them while fewer than `m` exist, otherwise the `m` hyperbolically closest
//! (`T = 0`) or `m` distinct nodes drawn without replacement with weights
//! `1 / (1 + exp((x - R_t) / 2T))` (`T > 0`).
//!
//! Angular coordinates are uniform for `C = 0` and an equal-weight Gaussian
//! mixture with `C` equidistant means for `C >= 1`.
//!
//! Random stream order is fixed: all `N` angles first, then connection
//! sampling node by node in birth order. The generator is ChaCha8 seeded from
//! the 64-bit seed, so networks are reproducible across platforms.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    angular_separation, geodesic_matrix, hyperbolic_distance, reduce_angle, GeodesicMatrix,
    PolarPoint,
};
use crate::graph::{Graph, WeightedGraph};

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NpsoParams {
    /// Number of nodes.
    pub n: usize,
    /// Links created by each newcomer; mean degree is about `2m`.
    pub m: usize,
    /// Temperature in `[0, 1)`.
    pub temperature: f64,
    /// Power-law exponent, at least 2.
    pub gamma: f64,
    /// Number of angular communities; 0 means uniform angles.
    pub communities: usize,
    pub seed: u64,
}

impl NpsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("N must be >= 2, got {}", self.n)));
        }
        if self.m < 1 {
            return Err(Error::Parameter("m must be >= 1".into()));
        }
        if self.m >= self.n {
            return Err(Error::Parameter(format!(
                "m must be < N, got m={} N={}",
                self.m, self.n
            )));
        }
        if !(self.temperature >= 0.0 && self.temperature < 1.0) {
            return Err(Error::Parameter(format!(
                "T must lie in [0, 1), got {}",
                self.temperature
            )));
        }
        if !(self.gamma >= 2.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "gamma must be >= 2, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Popularity fading parameter `β = 1/(γ-1)`.
    pub fn beta(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }
}

/// One component of the angular mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub mean: f64,
    pub std_dev: f64,
}

/// Equidistant means `2π(i-1)/C`, common deviation `(1/6)(2π/C)`.
pub fn mixture_components(communities: usize) -> Vec<MixtureComponent> {
    let spacing = TAU / communities as f64;
    (0..communities)
        .map(|i| MixtureComponent {
            mean: spacing * i as f64,
            std_dev: spacing / 6.0,
        })
        .collect()
}

/// Index of the component whose mean is angularly closest (ties to the lower index).
pub fn nearest_component(theta: f64, components: &[MixtureComponent]) -> usize {
    let mut best = 0;
    let mut best_sep = f64::INFINITY;
    for (c, comp) in components.iter().enumerate() {
        let sep = angular_separation(theta, comp.mean);
        if sep < best_sep {
            best = c;
            best_sep = sep;
        }
    }
    best
}

/// Draws the `N` angular coordinates and their community labels.
pub fn sample_angles<R: Rng + ?Sized>(params: &NpsoParams, rng: &mut R) -> (Vec<f64>, Vec<usize>) {
    let n = params.n;
    if params.communities == 0 {
        let angles = (0..n)
            .map(|_| rng.random::<f64>() * TAU)
            .map(reduce_angle)
            .collect();
        return (angles, vec![0; n]);
    }
    let comps = mixture_components(params.communities);
    let normals: Vec<Normal<f64>> = comps
        .iter()
        .map(|c| Normal::new(c.mean, c.std_dev).expect("positive deviation"))
        .collect();
    let mut angles = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rng.random_range(0..comps.len());
        let theta = reduce_angle(normals[c].sample(rng));
        angles.push(theta);
        labels.push(nearest_component(theta, &comps));
    }
    (angles, labels)
}

/// Output of the generator.
#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub params: NpsoParams,
    pub graph: Graph,
    /// Final (fully faded) coordinates.
    pub coords: Vec<PolarPoint>,
    pub communities: Vec<usize>,
    pub geodesics: GeodesicMatrix,
}

impl GeneratedNetwork {
    /// The network with each edge weighted by its geodesic length.
    pub fn geodesic_weighted(&self) -> WeightedGraph {
        WeightedGraph::from_graph(&self.graph, |u, v| self.geodesics.get(u, v))
            .expect("distinct nodes have positive geodesic distance")
    }

    /// Restriction to the giant component (node order preserved).
    pub fn restrict(&self, nodes: &[usize]) -> GeneratedNetwork {
        GeneratedNetwork {
            params: self.params,
            graph: self.graph.induced(nodes),
            coords: nodes.iter().map(|&u| self.coords[u]).collect(),
            communities: nodes.iter().map(|&u| self.communities[u]).collect(),
            geodesics: self.geodesics.submatrix(nodes),
        }
    }
}

/// Connection radius `R_t` for the soft (T > 0) connection probability.
pub fn connection_radius(t: usize, m: usize, temperature: f64, beta: f64) -> f64 {
    let t = t as f64;
    let m = m as f64;
    let r_t = 2.0 * t.ln();
    let scale = 2.0 * temperature / ((temperature * PI).sin() * m);
    if 1.0 - beta < 1e-12 {
        r_t - 2.0 * (scale * t.ln()).ln()
    } else {
        let one_minus = 1.0 - beta;
        r_t - 2.0 * (scale * (1.0 - (-one_minus * t.ln()).exp()) / one_minus).ln()
    }
}

fn connection_probability(x: f64, radius: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + ((x - radius) / (2.0 * temperature)).exp())
}

/// Grows one network.
pub fn generate(params: &NpsoParams) -> Result<GeneratedNetwork> {
    params.validate()?;
    let n = params.n;
    let m = params.m;
    let beta = params.beta();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let (angles, communities) = sample_angles(params, &mut rng);
    let birth: Vec<f64> = (1..=n).map(|t| 2.0 * (t as f64).ln()).collect();
    let mut radii = vec![0.0; n];
    let mut graph = Graph::empty(n);
    let mut dist = Vec::with_capacity(n);

    for k in 0..n {
        let r_t = birth[k];
        for s in 0..k {
            radii[s] = beta * birth[s] + (1.0 - beta) * r_t;
        }
        radii[k] = r_t;
        if k == 0 {
            continue;
        }
        let newcomer = PolarPoint::new(r_t, angles[k]);
        dist.clear();
        dist.extend(
            (0..k).map(|s| hyperbolic_distance(&PolarPoint::new(radii[s], angles[s]), &newcomer)),
        );

        if k <= m {
            for s in 0..k {
                graph.add_edge(k, s);
            }
        } else if params.temperature == 0.0 {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
            for &s in &order[..m] {
                graph.add_edge(k, s);
            }
        } else {
            let radius = connection_radius(k + 1, m, params.temperature, beta);
            // Efraimidis-Spirakis keys: taking the m largest `ln(u)/w` is
            // successive sampling without replacement proportional to w.
            let mut keyed: Vec<(f64, usize)> = (0..k)
                .map(|s| {
                    let w = connection_probability(dist[s], radius, params.temperature);
                    let u: f64 = rng.random();
                    let key = if w > 0.0 {
                        u.ln() / w
                    } else {
                        f64::NEG_INFINITY
                    };
                    (key, s)
                })
                .collect();
            keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(_, s) in &keyed[..m] {
                graph.add_edge(k, s);
            }
        }
    }

    let coords: Vec<PolarPoint> = radii
        .iter()
        .zip(&angles)
        .map(|(&r, &a)| PolarPoint::new(r, a))
        .collect();
    let geodesics = geodesic_matrix(&coords);
    Ok(GeneratedNetwork {
        params: *params,
        graph,
        coords,
        communities,
        geodesics,
    })
}
