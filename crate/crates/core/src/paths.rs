//! Topological shortest paths (TSP), geometrical shortest paths (GSP) and the
//! mean projection of all TSPs of a node pair.
//!
//! All TSPs of a pair `(s, t)` at hop distance `L` are enumerated by a
//! depth-first walk that only steps from `u` to a neighbor `v` when
//! `hops(v, t) = hops(u, t) - 1`. That restricts the walk to the shortest-path
//! DAG towards `t`: every branch ends at the target after exactly `L` hops, so
//! no dead ends are explored, and the output equals the set of all simple
//! `s`-`t` paths with `L` hops.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeodesicMatrix;
use crate::graph::{Graph, WeightedGraph};

/// Default per-pair cap on enumerated shortest paths.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// All-pairs hop counts. Unreachable pairs hold `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    d: Vec<u32>,
}

const UNREACHABLE: u32 = u32::MAX;

impl HopMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let h = self.d[i * self.n + j];
        (h != UNREACHABLE).then_some(h)
    }

    #[inline]
    fn row(&self, i: usize) -> &[u32] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

/// All-pairs weighted shortest-path lengths. Unreachable pairs hold `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

fn bfs_row(graph: &Graph, source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in graph.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop counts of topological shortest paths for every pair (one BFS per source).
pub fn tsp_lengths(graph: &Graph) -> HopMatrix {
    let n = graph.node_count();
    let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| bfs_row(graph, s)).collect();
    HopMatrix {
        n,
        d: rows.concat(),
    }
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node id
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_row(graph: &WeightedGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, w) in graph.weighted_neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Frontier(nd, v));
            }
        }
    }
    dist
}

/// Geometrical shortest-path lengths on a distance-weighted graph.
///
/// Weights are positive by construction of [`WeightedGraph`], so a
/// priority-queue relaxation per source gives exact all-pairs results.
pub fn gsp_lengths(graph: &WeightedGraph) -> DistanceMatrix {
    let n = graph.node_count();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| dijkstra_row(graph, s))
        .collect();
    let mut d = rows.concat();
    // runs from i and j may round differently; keep the matrix exactly symmetric
    for i in 0..n {
        for j in (i + 1)..n {
            let m = d[i * n + j].min(d[j * n + i]);
            d[i * n + j] = m;
            d[j * n + i] = m;
        }
    }
    DistanceMatrix { n, d }
}

/// All topological shortest paths between one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEnumeration {
    pub source: usize,
    pub target: usize,
    /// Hop count shared by every path.
    pub length: u32,
    /// Node sequences of `length + 1` nodes, in lexicographic order.
    pub paths: Vec<Vec<usize>>,
}

/// Number of shortest paths from `source` to `target`, saturating at `u128::MAX`.
pub fn count_tsp(graph: &Graph, hops: &HopMatrix, source: usize, target: usize) -> u128 {
    let to_target = hops.row(target);
    let Some(length) = hops.get(source, target) else {
        return 0;
    };
    let mut counts: HashMap<usize, u128> = HashMap::from([(source, 1)]);
    let mut layer = vec![source];
    for remaining in (0..length).rev() {
        let mut next: HashMap<usize, u128> = HashMap::new();
        for &u in &layer {
            let c = counts[&u];
            for &v in graph.neighbors(u) {
                if to_target[v] == remaining {
                    let e = next.entry(v).or_insert(0);
                    *e = e.saturating_add(c);
                }
            }
        }
        layer = next.keys().copied().collect();
        counts = next;
    }
    counts.get(&target).copied().unwrap_or(0)
}

/// Enumerates every topological shortest path from `source` to `target`.
///
/// Fails with [`Error::CapExceeded`] when the pair has more than `cap`
/// shortest paths (checked by counting before anything is materialized), and
/// with [`Error::Domain`] when the pair is disconnected.
pub fn enumerate_tsp(
    graph: &Graph,
    hops: &HopMatrix,
    source: usize,
    target: usize,
    cap: Option<usize>,
) -> Result<PathEnumeration> {
    let length = hops
        .get(source, target)
        .ok_or_else(|| Error::Domain(format!("nodes {source} and {target} are disconnected")))?;
    if let Some(cap) = cap {
        let count = count_tsp(graph, hops, source, target);
        if count > cap as u128 {
            return Err(Error::CapExceeded {
                source_node: source,
                target,
                cap,
                count,
            });
        }
    }
    let to_target = hops.row(target);
    let mut paths = Vec::new();
    let mut path = Vec::with_capacity(length as usize + 1);
    path.push(source);
    descend(graph, to_target, source, length, &mut path, &mut paths);
    Ok(PathEnumeration {
        source,
        target,
        length,
        paths,
    })
}

fn descend(
    graph: &Graph,
    to_target: &[u32],
    u: usize,
    remaining: u32,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(path.clone());
        return;
    }
    for &v in graph.neighbors(u) {
        if to_target[v] == remaining - 1 {
            path.push(v);
            descend(graph, to_target, v, remaining - 1, path, out);
            path.pop();
        }
    }
}

/// Sum of edge weights along a path.
pub fn projection(path: &[usize], weights: &WeightedGraph) -> Result<f64> {
    path.windows(2).try_fold(0.0, |acc, w| {
        weights
            .weight(w[0], w[1])
            .map(|x| acc + x)
            .ok_or_else(|| Error::Data(format!("path uses missing edge ({}, {})", w[0], w[1])))
    })
}

/// Mean projection of the enumerated paths.
pub fn mean_ptsp(enumeration: &PathEnumeration, weights: &WeightedGraph) -> Result<f64> {
    if enumeration.paths.is_empty() {
        return Err(Error::Domain("mean projection of an empty path set".into()));
    }
    let mut sum = 0.0;
    for p in &enumeration.paths {
        sum += projection(p, weights)?;
    }
    Ok(sum / enumeration.paths.len() as f64)
}

/// Per nonadjacent pair summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub tsp_len: u32,
    pub n_tsp: usize,
    pub mean_ptsp: f64,
    /// Smallest projection; equals the GSP length when the GSP is itself a TSP.
    pub min_ptsp: f64,
    pub max_ptsp: f64,
    /// Hyperbolic geodesic, when node coordinates are known.
    pub geo: Option<f64>,
    pub gsp: f64,
}

/// Pair records over every connected nonadjacent pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSet {
    pub n: usize,
    pub edges: usize,
    pub records: Vec<PairRecord>,
    /// Nonadjacent pairs skipped because no path joins them.
    pub disconnected_pairs: usize,
}

/// Shared shortest-path state for one network.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub hops: HopMatrix,
    pub gsp: DistanceMatrix,
}

impl ShortestPaths {
    pub fn compute(weights: &WeightedGraph) -> Self {
        Self {
            hops: tsp_lengths(weights.graph()),
            gsp: gsp_lengths(weights),
        }
    }
}

/// Builds a [`PairRecord`] for every nonadjacent pair of `weights`.
pub fn pair_records(
    weights: &WeightedGraph,
    geodesics: Option<&GeodesicMatrix>,
    cap: Option<usize>,
) -> Result<PairSet> {
    let sp = ShortestPaths::compute(weights);
    pair_records_with(weights, &sp, geodesics, cap)
}

/// As [`pair_records`], reusing precomputed shortest-path matrices.
pub fn pair_records_with(
    weights: &WeightedGraph,
    sp: &ShortestPaths,
    geodesics: Option<&GeodesicMatrix>,
    cap: Option<usize>,
) -> Result<PairSet> {
    let graph = weights.graph();
    let n = graph.node_count();
    if let Some(g) = geodesics {
        if g.n() != n {
            return Err(Error::Data(format!(
                "geodesic matrix is {}x{} but graph has {n} nodes",
                g.n(),
                g.n()
            )));
        }
    }
    let per_source: Vec<Result<(Vec<PairRecord>, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut records = Vec::new();
            let mut disconnected = 0;
            for j in (i + 1)..n {
                if graph.has_edge(i, j) {
                    continue;
                }
                if sp.hops.get(i, j).is_none() {
                    disconnected += 1;
                    continue;
                }
                let paths = enumerate_tsp(graph, &sp.hops, i, j, cap)?;
                let mut sum = 0.0;
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for p in &paths.paths {
                    let x = projection(p, weights)?;
                    sum += x;
                    min = min.min(x);
                    max = max.max(x);
                }
                records.push(PairRecord {
                    i,
                    j,
                    tsp_len: paths.length,
                    n_tsp: paths.paths.len(),
                    mean_ptsp: sum / paths.paths.len() as f64,
                    min_ptsp: min,
                    max_ptsp: max,
                    geo: geodesics.map(|g| g.get(i, j)),
                    gsp: sp.gsp.get(i, j),
                });
            }
            Ok((records, disconnected))
        })
        .collect();

    let mut records = Vec::new();
    let mut disconnected_pairs = 0;
    for part in per_source {
        let (r, d) = part?;
        records.extend(r);
        disconnected_pairs += d;
    }
    if disconnected_pairs > 0 {
        log::warn!("{disconnected_pairs} nonadjacent pairs are disconnected and excluded");
    }
    Ok(PairSet {
        n,
        edges: graph.edge_count(),
        records,
        disconnected_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_matrix, PolarPoint};

    fn cycle4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn hop_counts_small_graphs() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let h = tsp_lengths(&path);
        assert_eq!(h.get(0, 2), Some(2));
        assert_eq!(h.get(1, 1), Some(0));
        let c = tsp_lengths(&cycle4());
        assert_eq!(c.get(0, 2), Some(2));
        assert_eq!(c.get(1, 3), Some(2));
        let split = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(tsp_lengths(&split).get(0, 2), None);
    }

    #[test]
    fn weighted_small_graphs() {
        let tri = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        let d = gsp_lengths(&tri);
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(2, 0), 2.0);
        let path = WeightedGraph::from_edges(3, [(0, 1, 2.5), (1, 2, 4.0)]).unwrap();
        assert_eq!(gsp_lengths(&path).get(0, 2), 6.5);
        let split = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(gsp_lengths(&split).get(0, 2).is_infinite());
    }

    #[test]
    fn enumerate_cycle_and_path() {
        let g = cycle4();
        let h = tsp_lengths(&g);
        let e = enumerate_tsp(&g, &h, 0, 2, None).unwrap();
        assert_eq!(e.length, 2);
        assert_eq!(e.paths, vec![vec![0, 1, 2], vec![0, 3, 2]]);
        let p = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let hp = tsp_lengths(&p);
        assert_eq!(
            enumerate_tsp(&p, &hp, 0, 2, None).unwrap().paths,
            vec![vec![0, 1, 2]]
        );
        assert_eq!(
            enumerate_tsp(&p, &hp, 1, 1, None).unwrap().paths,
            vec![vec![1]]
        );
    }

    #[test]
    fn cap_is_enforced_before_enumeration() {
        // complete bipartite K_{2,5}: 5 shortest paths between the two hubs
        let edges: Vec<_> = (2..7).flat_map(|v| [(0, v), (1, v)]).collect();
        let g = Graph::from_edges(7, edges).unwrap();
        let h = tsp_lengths(&g);
        assert_eq!(count_tsp(&g, &h, 0, 1), 5);
        assert_eq!(enumerate_tsp(&g, &h, 0, 1, Some(5)).unwrap().paths.len(), 5);
        match enumerate_tsp(&g, &h, 0, 1, Some(4)) {
            Err(Error::CapExceeded {
                source_node,
                target,
                cap,
                count,
            }) => {
                assert_eq!((source_node, target, cap, count), (0, 1, 4, 5));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn disconnected_pair_is_domain_error() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let h = tsp_lengths(&g);
        assert!(matches!(
            enumerate_tsp(&g, &h, 0, 2, None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mean_projection() {
        let w = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let single = PathEnumeration {
            source: 0,
            target: 2,
            length: 2,
            paths: vec![vec![0, 1, 2]],
        };
        assert_eq!(mean_ptsp(&single, &w).unwrap(), 3.0);

        let sq = WeightedGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 3.0), (2, 3, 4.0), (3, 0, 2.0)])
            .unwrap();
        let both = PathEnumeration {
            source: 0,
            target: 2,
            length: 2,
            paths: vec![vec![0, 1, 2], vec![0, 3, 2]],
        };
        assert_eq!(mean_ptsp(&both, &sq).unwrap(), 5.0);

        let empty = PathEnumeration {
            paths: vec![],
            ..single.clone()
        };
        assert!(matches!(mean_ptsp(&empty, &w), Err(Error::Domain(_))));
        let bad = PathEnumeration {
            paths: vec![vec![0, 2]],
            ..single
        };
        assert!(matches!(mean_ptsp(&bad, &w), Err(Error::Data(_))));
    }

    #[test]
    fn complete_graph_has_no_pairs() {
        let edges: Vec<_> = (0..5)
            .flat_map(|u| ((u + 1)..5).map(move |v| (u, v, 1.0)))
            .collect();
        let w = WeightedGraph::from_edges(5, edges).unwrap();
        let set = pair_records(&w, None, None).unwrap();
        assert!(set.records.is_empty());
    }

    #[test]
    fn square_embedding_records() {
        let pts: Vec<_> = (0..4)
            .map(|k| PolarPoint::new(3.0, k as f64 * std::f64::consts::FRAC_PI_2))
            .collect();
        let geo = geodesic_matrix(&pts);
        let w = WeightedGraph::from_graph(&cycle4(), |u, v| geo.get(u, v)).unwrap();
        let set = pair_records(&w, Some(&geo), None).unwrap();
        assert_eq!(set.records.len(), 2);
        for r in &set.records {
            assert_eq!(r.n_tsp, 2);
            assert_eq!(r.tsp_len, 2);
            assert!((r.geo.unwrap() - 6.0).abs() < 1e-12);
            assert!((r.mean_ptsp - 2.0 * geo.get(0, 1)).abs() < 1e-12);
            assert_eq!(r.gsp, r.min_ptsp);
        }
    }

    #[test]
    fn disconnected_pairs_are_counted() {
        let w = WeightedGraph::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]).unwrap();
        let set = pair_records(&w, None, None).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.disconnected_pairs, 6);
    }

    #[test]
    fn cap_error_identifies_pair() {
        let edges: Vec<_> = (2..7).flat_map(|v| [(0, v, 1.0), (1, v, 1.0)]).collect();
        let w = WeightedGraph::from_edges(7, edges).unwrap();
        match pair_records(&w, None, Some(4)) {
            Err(Error::CapExceeded {
                source_node: 0,
                target: 1,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
