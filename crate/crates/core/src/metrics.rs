//! Geometrical congruence (GC), greedy routing and greedy routing efficiency (GRE).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, PolarPoint};
use crate::graph::{Graph, WeightedGraph};
use crate::paths::PairSet;

/// Which reference distance a GC or GRE value is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    /// Latent-space geodesic.
    Geo,
    /// Geometrical shortest path on the distance-weighted graph.
    Gsp,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reference::Geo => "geo",
            Reference::Gsp => "gsp",
        })
    }
}

impl FromStr for Reference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "geo" => Ok(Reference::Geo),
            "gsp" => Ok(Reference::Gsp),
            other => Err(Error::Usage(format!(
                "unknown reference '{other}', expected geo or gsp"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub gc: f64,
    pub reference: Reference,
    pub n_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_pair_ratios: Option<Vec<f64>>,
}

/// GC: mean over nonadjacent pairs of `RD(i,j) / mean_ptsp(i,j)`.
pub fn gc(pairs: &PairSet, reference: Reference) -> Result<CongruenceReport> {
    if pairs.records.is_empty() {
        return Err(Error::Domain(
            "GC undefined: the network has no nonadjacent connected pairs".into(),
        ));
    }
    let ratios = pairs
        .records
        .iter()
        .map(|r| {
            let rd = match reference {
                Reference::Geo => r
                    .geo
                    .ok_or_else(|| Error::Domain("GC(GEO) needs geodesic distances".into()))?,
                Reference::Gsp => r.gsp,
            };
            Ok(rd / r.mean_ptsp)
        })
        .collect::<Result<Vec<f64>>>()?;
    let gc = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(CongruenceReport {
        gc,
        reference,
        n_pairs: ratios.len(),
        per_pair_ratios: Some(ratios),
    })
}

/// Counts pairs breaking `geo <= gsp <= mean_ptsp <= max_ptsp` beyond `tol`.
pub fn pair_axiom_violations(pairs: &PairSet, tol: f64) -> usize {
    pairs
        .records
        .iter()
        .filter(|r| {
            let geo_ok = r.geo.is_none_or(|g| g <= r.gsp + tol);
            !(geo_ok
                && r.gsp <= r.mean_ptsp + tol
                && r.mean_ptsp <= r.max_ptsp + tol
                && r.n_tsp >= 1)
        })
        .count()
}

/// Why a greedy packet did not arrive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// The next hop was the node the packet just came from.
    Backtrack,
    /// The route reached `n` hops without arriving.
    HopLimit,
    /// The source has no neighbors.
    Isolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteOutcome {
    Delivered,
    Dropped(DropReason),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyRouteResult {
    pub source: usize,
    pub target: usize,
    pub outcome: RouteOutcome,
    /// Nodes visited, starting at the source (ends at the target when delivered).
    pub hops: Vec<usize>,
    /// Summed edge distances of the route; `+∞` when dropped.
    pub pgrp: f64,
}

impl GreedyRouteResult {
    pub fn delivered(&self) -> bool {
        self.outcome == RouteOutcome::Delivered
    }
}

/// What a node sees when forwarding: its own neighbor list with their
/// coordinates. The destination's coordinates arrive with the packet.
struct LocalView<'a> {
    neighbors: &'a [usize],
    coords: &'a [PolarPoint],
}

impl LocalView<'_> {
    /// Neighbor closest to `destination`; ties go to the lower id.
    fn closest_to(&self, destination: &PolarPoint) -> Option<usize> {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for &v in self.neighbors {
            let d = hyperbolic_distance(&self.coords[v], destination);
            if d < best_d {
                best = Some(v);
                best_d = d;
            }
        }
        best
    }
}

/// Greedy router over a network embedded in the hyperbolic disk.
pub struct GreedyRouter<'a> {
    weights: &'a WeightedGraph,
    coords: &'a [PolarPoint],
}

impl<'a> GreedyRouter<'a> {
    /// `weights` supplies edge distances for the route projection, `coords`
    /// the positions used for forwarding decisions.
    pub fn new(weights: &'a WeightedGraph, coords: &'a [PolarPoint]) -> Result<Self> {
        if coords.len() != weights.node_count() {
            return Err(Error::Data(format!(
                "{} coordinates for {} nodes",
                coords.len(),
                weights.node_count()
            )));
        }
        Ok(Self { weights, coords })
    }

    pub fn graph(&self) -> &Graph {
        self.weights.graph()
    }

    fn view(&self, node: usize) -> LocalView<'_> {
        LocalView {
            neighbors: self.weights.graph().neighbors(node),
            coords: self.coords,
        }
    }

    /// Forwards a packet hop by hop to the neighbor closest to the
    /// destination. The packet is dropped when that neighbor is the node it
    /// arrived from, or after `n` hops.
    pub fn route(&self, source: usize, target: usize) -> GreedyRouteResult {
        assert_ne!(source, target, "greedy routing needs distinct endpoints");
        let n = self.weights.node_count();
        let destination = self.coords[target];
        let mut hops = vec![source];
        let dropped = |hops: Vec<usize>, why| GreedyRouteResult {
            source,
            target,
            outcome: RouteOutcome::Dropped(why),
            hops,
            pgrp: f64::INFINITY,
        };
        if self.weights.graph().degree(source) == 0 {
            return dropped(hops, DropReason::Isolated);
        }
        let mut previous = None;
        let mut current = source;
        let mut pgrp = 0.0;
        while current != target {
            if hops.len() > n {
                log::debug!("greedy route {source}->{target} hit the {n}-hop limit");
                return dropped(hops, DropReason::HopLimit);
            }
            let next = self
                .view(current)
                .closest_to(&destination)
                .expect("nodes on a route have at least one neighbor");
            if Some(next) == previous {
                hops.push(next);
                return dropped(hops, DropReason::Backtrack);
            }
            pgrp += self
                .weights
                .weight(current, next)
                .expect("next hop is a neighbor");
            previous = Some(current);
            current = next;
            hops.push(next);
        }
        GreedyRouteResult {
            source,
            target,
            outcome: RouteOutcome::Delivered,
            hops,
            pgrp,
        }
    }

    /// Routes every ordered pair `(i, j)`, `i != j`, optionally skipping adjacent ones.
    /// Results are ordered by source, then target.
    pub fn route_all(&self, nonadjacent_only: bool) -> Vec<GreedyRouteResult> {
        let graph = self.weights.graph();
        let n = graph.node_count();
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && !(nonadjacent_only && graph.has_edge(i, j)))
                    .map(|j| self.route(i, j))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .concat()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreVariant {
    NonadjacentOnly,
    AllPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigabilityReport {
    pub gre: f64,
    pub reference: Reference,
    pub variant: GreVariant,
    pub success_rate: f64,
    pub routes: usize,
    pub delivered: usize,
    pub backtrack_drops: usize,
    pub hop_limit_drops: usize,
}

fn check_coverage(
    graph: &Graph,
    results: &[GreedyRouteResult],
    nonadjacent_only: bool,
) -> Result<()> {
    let n = graph.node_count();
    let expected = if nonadjacent_only {
        n * n.saturating_sub(1) - 2 * graph.edge_count()
    } else {
        n * n.saturating_sub(1)
    };
    if results.len() != expected {
        return Err(Error::Domain(format!(
            "expected {expected} ordered routes, got {}",
            results.len()
        )));
    }
    let mut seen = vec![false; n * n];
    for r in results {
        if r.source >= n || r.target >= n || r.source == r.target {
            return Err(Error::Domain(format!(
                "invalid route pair ({}, {})",
                r.source, r.target
            )));
        }
        if nonadjacent_only && graph.has_edge(r.source, r.target) {
            return Err(Error::Domain(format!(
                "route pair ({}, {}) is adjacent",
                r.source, r.target
            )));
        }
        let k = r.source * n + r.target;
        if seen[k] {
            return Err(Error::Domain(format!(
                "route pair ({}, {}) repeated",
                r.source, r.target
            )));
        }
        seen[k] = true;
    }
    Ok(())
}

fn summarize(
    results: &[GreedyRouteResult],
    reference_distance: impl Fn(usize, usize) -> f64,
    reference: Reference,
    variant: GreVariant,
) -> NavigabilityReport {
    let mut sum = 0.0;
    let mut delivered = 0;
    let mut backtrack_drops = 0;
    let mut hop_limit_drops = 0;
    for r in results {
        match r.outcome {
            RouteOutcome::Delivered => {
                delivered += 1;
                sum += reference_distance(r.source, r.target) / r.pgrp;
            }
            RouteOutcome::Dropped(DropReason::HopLimit) => hop_limit_drops += 1,
            RouteOutcome::Dropped(DropReason::Backtrack) => backtrack_drops += 1,
            RouteOutcome::Dropped(DropReason::Isolated) => {}
        }
    }
    if hop_limit_drops > 0 {
        log::info!("{hop_limit_drops} greedy routes dropped by the hop limit");
    }
    let total = results.len() as f64;
    NavigabilityReport {
        gre: sum / total,
        reference,
        variant,
        success_rate: delivered as f64 / total,
        routes: results.len(),
        delivered,
        backtrack_drops,
        hop_limit_drops,
    }
}

/// GRE over ordered nonadjacent pairs; dropped routes contribute zero.
pub fn gre(
    graph: &Graph,
    results: &[GreedyRouteResult],
    reference_distance: impl Fn(usize, usize) -> f64,
    reference: Reference,
) -> Result<NavigabilityReport> {
    if graph.nonadjacent_pairs() == 0 {
        return Err(Error::Domain(
            "GRE undefined: the network has no nonadjacent pairs".into(),
        ));
    }
    check_coverage(graph, results, true)?;
    Ok(summarize(
        results,
        reference_distance,
        reference,
        GreVariant::NonadjacentOnly,
    ))
}

/// GRE over all ordered pairs, adjacent ones included.
pub fn gre_all_pairs(
    graph: &Graph,
    results: &[GreedyRouteResult],
    reference_distance: impl Fn(usize, usize) -> f64,
    reference: Reference,
) -> Result<NavigabilityReport> {
    if graph.node_count() < 2 {
        return Err(Error::Domain(
            "GRE undefined for fewer than two nodes".into(),
        ));
    }
    check_coverage(graph, results, false)?;
    Ok(summarize(
        results,
        reference_distance,
        reference,
        GreVariant::AllPairs,
    ))
}
