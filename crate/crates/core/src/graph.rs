//! Simple undirected graphs, plain and distance-weighted.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds a graph from an edge list. Self-loops and out-of-range ids are
    /// rejected; duplicate edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Data(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::Data(format!("self-loop on node {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Adds `u—v`; returns false if the edge already existed.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        debug_assert!(u != v);
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edges += 1;
                true
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Neighbors of `u` in ascending id order.
    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edges as f64 / self.adj.len() as f64
    }

    /// Number of unordered nonadjacent pairs, `(n(n-1) - 2e) / 2`.
    pub fn nonadjacent_pairs(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1) / 2 - self.edges
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }

    /// Nodes of the largest component (ties go to the one with the smallest member).
    pub fn giant_component(&self) -> Vec<usize> {
        let mut best: Vec<usize> = Vec::new();
        for c in self.components() {
            if c.len() > best.len() {
                best = c;
            }
        }
        best
    }

    /// Induced subgraph; node `k` of the result is `nodes[k]`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.node_count()];
        for (k, &u) in nodes.iter().enumerate() {
            index[u] = k;
        }
        let mut g = Graph::empty(nodes.len());
        for (k, &u) in nodes.iter().enumerate() {
            for &v in &self.adj[u] {
                let kv = index[v];
                if kv != usize::MAX && kv > k {
                    g.add_edge(k, kv);
                }
            }
        }
        g
    }

    /// Local clustering coefficient of `u` (0 for degree < 2).
    pub fn local_clustering(&self, u: usize) -> f64 {
        let nbrs = &self.adj[u];
        let k = nbrs.len();
        if k < 2 {
            return 0.0;
        }
        let mut links = 0usize;
        for (a, &v) in nbrs.iter().enumerate() {
            for &w in &nbrs[a + 1..] {
                if self.has_edge(v, w) {
                    links += 1;
                }
            }
        }
        2.0 * links as f64 / (k * (k - 1)) as f64
    }

    /// Mean local clustering over all nodes.
    pub fn mean_clustering(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        (0..n).map(|u| self.local_clustering(u)).sum::<f64>() / n as f64
    }
}

/// Simple undirected graph whose edges carry positive distances.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    graph: Graph,
    // parallel to graph.adj
    weights: Vec<Vec<f64>>,
}

impl WeightedGraph {
    /// Builds a weighted graph. Every weight must be finite and > 0; a
    /// repeated edge must repeat the same weight.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut graph = Graph::empty(n);
        let mut weights: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Data(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::Data(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Data(format!(
                    "edge ({u}, {v}) has nonpositive weight {w}"
                )));
            }
            if graph.add_edge(u, v) {
                let pu = graph.adj[u].binary_search(&v).unwrap();
                weights[u].insert(pu, w);
                let pv = graph.adj[v].binary_search(&u).unwrap();
                weights[v].insert(pv, w);
            } else {
                let pu = graph.adj[u].binary_search(&v).unwrap();
                if weights[u][pu] != w {
                    return Err(Error::Data(format!(
                        "edge ({u}, {v}) given two different weights"
                    )));
                }
            }
        }
        Ok(Self { graph, weights })
    }

    /// Weights every edge of `graph` with `weight(u, v)`.
    pub fn from_graph(graph: &Graph, weight: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::from_edges(
            graph.node_count(),
            graph.edges().map(|(u, v)| (u, v, weight(u, v))),
        )
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Neighbors of `u` with edge weights, ascending by neighbor id.
    pub fn weighted_neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.graph.adj[u]
            .iter()
            .copied()
            .zip(self.weights[u].iter().copied())
    }

    /// Weight of edge `u—v`, if present.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.graph.adj[u]
            .binary_search(&v)
            .ok()
            .map(|p| self.weights[u][p])
    }

    pub fn induced(&self, nodes: &[usize]) -> WeightedGraph {
        let sub = self.graph.induced(nodes);
        WeightedGraph::from_graph(&sub, |a, b| self.weight(nodes[a], nodes[b]).unwrap())
            .expect("induced subgraph keeps valid weights")
    }
}
