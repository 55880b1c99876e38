#![allow(dead_code, clippy::needless_range_loop)]

use netcongruence::{Graph, WeightedGraph};
use rand::Rng;

/// Naive all-paths-of-length-L recursion: explores every simple path and
/// keeps those that reach the target at exactly L hops.
/// `path` is passed by value so every branch owns its prefix.
pub fn find_paths(adj: &[Vec<usize>], s: usize, t: usize, len: usize) -> Vec<Vec<usize>> {
    let mut paths = Vec::new();
    find_paths_rec(adj, s, t, len as isize, &mut paths, Vec::new());
    paths
}

fn find_paths_rec(
    adj: &[Vec<usize>],
    u: usize,
    t: usize,
    len: isize,
    paths: &mut Vec<Vec<usize>>,
    mut path: Vec<usize>,
) {
    let l = path.len() as isize - 1;
    if u != t && !path.contains(&u) && l + 1 < len {
        path.push(u);
        for &v in &adj[u] {
            find_paths_rec(adj, v, t, len, paths, path.clone());
        }
    } else if u == t && l + 1 == len {
        path.push(t);
        paths.push(path);
    }
}

/// Erdős–Rényi G(n, p).
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.node_count())
        .map(|u| g.neighbors(u).to_vec())
        .collect()
}

/// Hop distances by Floyd–Warshall; `None` for unreachable.
pub fn floyd_hops(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for &v in g.neighbors(u) {
            d[u][v] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Single-source weighted distances by repeated edge relaxation.
pub fn bellman_ford(w: &WeightedGraph, source: usize) -> Vec<f64> {
    let n = w.node_count();
    let mut d = vec![f64::INFINITY; n];
    d[source] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            for (v, x) in w.weighted_neighbors(u) {
                if d[u] + x < d[v] {
                    d[v] = d[u] + x;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Approximate discrete power-law exponent MLE over values `>= kmin`.
pub fn power_law_exponent(values: &[usize], kmin: usize) -> f64 {
    let tail: Vec<f64> = values
        .iter()
        .filter(|&&k| k >= kmin)
        .map(|&k| k as f64)
        .collect();
    let s: f64 = tail.iter().map(|k| (k / (kmin as f64 - 0.5)).ln()).sum();
    1.0 + tail.len() as f64 / s
}

/// Discrete power-law sample by rounding a continuous Pareto draw.
pub fn power_law_sample<R: Rng>(n: usize, gamma: f64, kmin: usize, rng: &mut R) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            ((kmin as f64 - 0.5) * (1.0 - u).powf(-1.0 / (gamma - 1.0)) + 0.5).floor() as usize
        })
        .collect()
}
