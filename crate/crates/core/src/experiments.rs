//! Experiment protocols: GEO vs p̄TSP distribution comparisons, the
//! (d̄, γ, T) parameter grid of GC/GRE heatmaps, and connectome group
//! comparisons.
//!
//! Every realization's seed is derived from the base seed and the cell
//! coordinates alone, and results are reduced in a fixed order, so outputs
//! do not depend on the worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectome::{
    group_compare, load_subjects, GroupComparison, SkippedSubject, StrengthMatrix,
};
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratedNetwork, NpsoParams};
use crate::metrics::{gc, gre, pair_axiom_violations, GreedyRouter, Reference};
use crate::paths::{pair_records_with, PairSet, ShortestPaths};
use crate::stats::{kde, mann_whitney, KdeCurve, MwuResult, DEFAULT_GRID_SIZE};

/// Absolute slack for floating-point comparisons in the metric axioms.
pub const AXIOM_TOLERANCE: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit mix of a sequence of integers.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C909, |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

fn hundredths(x: f64) -> u64 {
    (x * 100.0).round() as u64
}

/// Half the average degree, rounded.
pub fn m_for_dbar(dbar: u32) -> usize {
    (dbar as f64 / 2.0).round() as usize
}

/// A network reduced to its giant component when disconnected.
fn giant_view(net: GeneratedNetwork) -> (GeneratedNetwork, bool) {
    if net.graph.is_connected() {
        (net, false)
    } else {
        let giant = net.graph.giant_component();
        log::warn!(
            "seed {}: network disconnected, keeping giant component of {} of {} nodes",
            net.params.seed,
            giant.len(),
            net.params.n
        );
        (net.restrict(&giant), true)
    }
}

/// All four metrics of one generated network, plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEvaluation {
    pub nodes: usize,
    pub edges: usize,
    /// Nodes analysed (the giant component when `disconnected`).
    pub nodes_used: usize,
    pub disconnected: bool,
    pub pairs: usize,
    pub gc_geo: f64,
    pub gre_geo: f64,
    pub gc_gsp: f64,
    pub gre_gsp: f64,
    pub success_rate: f64,
    pub mean_tsp_hops: f64,
    pub backtrack_drops: usize,
    pub hop_limit_drops: usize,
    /// Pairs or aggregates breaking `geo <= gsp <= p̄TSP`, `GC, GRE ∈ [0, 1]`
    /// or `GRE <= success rate`. Zero for a sound run.
    pub axiom_violations: usize,
}

fn pair_set_of(
    net: &GeneratedNetwork,
    cap: Option<usize>,
) -> Result<(crate::graph::WeightedGraph, ShortestPaths, PairSet)> {
    let weights = net.geodesic_weighted();
    let sp = ShortestPaths::compute(&weights);
    let pairs = pair_records_with(&weights, &sp, Some(&net.geodesics), cap)?;
    Ok((weights, sp, pairs))
}

/// Computes GC and GRE with both references on `net` (or its giant component).
pub fn evaluate_network(net: &GeneratedNetwork, cap: Option<usize>) -> Result<NetworkEvaluation> {
    let nodes = net.graph.node_count();
    let edges = net.graph.edge_count();
    let (net, disconnected) = giant_view(net.clone());
    let (weights, sp, pairs) = pair_set_of(&net, cap)?;
    let gc_geo = gc(&pairs, Reference::Geo)?.gc;
    let gc_gsp = gc(&pairs, Reference::Gsp)?.gc;

    let router = GreedyRouter::new(&weights, &net.coords)?;
    let routes = router.route_all(true);
    let geo = gre(
        &net.graph,
        &routes,
        |i, j| net.geodesics.get(i, j),
        Reference::Geo,
    )?;
    let gsp = gre(&net.graph, &routes, |i, j| sp.gsp.get(i, j), Reference::Gsp)?;

    let in_unit = |x: f64| (-AXIOM_TOLERANCE..=1.0 + AXIOM_TOLERANCE).contains(&x);
    let mut violations = pair_axiom_violations(&pairs, AXIOM_TOLERANCE);
    violations += [gc_geo, gc_gsp, geo.gre, gsp.gre]
        .iter()
        .filter(|&&x| !in_unit(x))
        .count();
    violations += [&geo, &gsp]
        .iter()
        .filter(|r| r.gre > r.success_rate + AXIOM_TOLERANCE)
        .count();

    let mean_tsp_hops =
        pairs.records.iter().map(|r| r.tsp_len as f64).sum::<f64>() / pairs.records.len() as f64;
    Ok(NetworkEvaluation {
        nodes,
        edges,
        nodes_used: net.graph.node_count(),
        disconnected,
        pairs: pairs.records.len(),
        gc_geo,
        gre_geo: geo.gre,
        gc_gsp,
        gre_gsp: gsp.gre,
        success_rate: geo.success_rate,
        mean_tsp_hops,
        backtrack_drops: geo.backtrack_drops,
        hop_limit_drops: geo.hop_limit_drops,
        axiom_violations: violations,
    })
}

/// Axes and repetition count of a heatmap sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub dbar_values: Vec<u32>,
    pub gamma_values: Vec<f64>,
    pub temperature_values: Vec<f64>,
    pub communities: usize,
    pub realizations: usize,
    pub base_seed: u64,
    pub path_cap: Option<usize>,
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dbar_values.is_empty()
            || self.gamma_values.is_empty()
            || self.temperature_values.is_empty()
        {
            return Err(Error::Usage("grid axes must be nonempty".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Usage(
                "at least one realization per cell is required".into(),
            ));
        }
        Ok(())
    }

    /// Cells in row-major order: T, then d̄, then γ.
    pub fn cells(&self) -> Vec<CellCoords> {
        let mut out = Vec::new();
        for &temperature in &self.temperature_values {
            for &dbar in &self.dbar_values {
                for &gamma in &self.gamma_values {
                    out.push(CellCoords {
                        dbar,
                        m: m_for_dbar(dbar),
                        gamma,
                        temperature,
                        communities: self.communities,
                    });
                }
            }
        }
        out
    }

    pub fn realization_seed(&self, cell: &CellCoords, realization: usize) -> u64 {
        mix_seed(&[
            self.base_seed,
            cell.dbar as u64,
            hundredths(cell.gamma),
            hundredths(cell.temperature),
            cell.communities as u64,
            realization as u64,
        ])
    }

    pub fn params(&self, cell: &CellCoords, realization: usize) -> NpsoParams {
        NpsoParams {
            n: self.n,
            m: cell.m,
            temperature: cell.temperature,
            gamma: cell.gamma,
            communities: cell.communities,
            seed: self.realization_seed(cell, realization),
        }
    }
}

/// Named parameter sets of the standard sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPreset {
    /// N = 100, T = 0.1, C = 4.
    Fig3,
    /// N = 100, C = 0, T ∈ {0.1, 0.3, 0.5}.
    Suppl1,
    /// N = 100, C = 4, T ∈ {0.1, 0.3, 0.5}.
    Suppl2,
    /// N = 1000, C = 0, T ∈ {0.1, 0.3, 0.5}.
    Suppl3,
    /// N = 1000, C = 4, T ∈ {0.1, 0.3, 0.5}.
    Suppl4,
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig3" => GridPreset::Fig3,
            "suppl1" => GridPreset::Suppl1,
            "suppl2" => GridPreset::Suppl2,
            "suppl3" => GridPreset::Suppl3,
            "suppl4" => GridPreset::Suppl4,
            other => return Err(Error::Usage(format!("unknown grid preset '{other}'"))),
        })
    }
}

impl GridPreset {
    pub fn config(self, base_seed: u64) -> GridConfig {
        let (n, communities, temperature_values) = match self {
            GridPreset::Fig3 => (100, 4, vec![0.1]),
            GridPreset::Suppl1 => (100, 0, vec![0.1, 0.3, 0.5]),
            GridPreset::Suppl2 => (100, 4, vec![0.1, 0.3, 0.5]),
            GridPreset::Suppl3 => (1000, 0, vec![0.1, 0.3, 0.5]),
            GridPreset::Suppl4 => (1000, 4, vec![0.1, 0.3, 0.5]),
        };
        GridConfig {
            n,
            dbar_values: vec![4, 8, 12, 16, 20],
            gamma_values: vec![2.0, 2.25, 2.5, 2.75, 3.0],
            temperature_values,
            communities,
            realizations: 10,
            base_seed,
            path_cap: Some(crate::paths::DEFAULT_PATH_CAP),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCoords {
    pub dbar: u32,
    pub m: usize,
    pub gamma: f64,
    pub temperature: f64,
    pub communities: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub realization: usize,
    pub seed: u64,
    pub evaluation: Option<NetworkEvaluation>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (0 for a single value).
    pub std: f64,
}

impl MetricSummary {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    #[serde(flatten)]
    pub coords: CellCoords,
    pub gc_geo: Option<MetricSummary>,
    pub gre_geo: Option<MetricSummary>,
    pub gc_gsp: Option<MetricSummary>,
    pub gre_gsp: Option<MetricSummary>,
    pub ok: usize,
    pub failed: usize,
    pub disconnected: usize,
    /// First failure message, when any realization failed.
    pub error: Option<String>,
    pub realizations: Vec<RealizationRecord>,
}

impl HeatmapCell {
    fn from_records(coords: CellCoords, realizations: Vec<RealizationRecord>) -> Self {
        let evals: Vec<&NetworkEvaluation> = realizations
            .iter()
            .filter_map(|r| r.evaluation.as_ref())
            .collect();
        let summary = |f: fn(&NetworkEvaluation) -> f64| {
            MetricSummary::of(&evals.iter().map(|e| f(e)).collect::<Vec<_>>())
        };
        Self {
            coords,
            gc_geo: summary(|e| e.gc_geo),
            gre_geo: summary(|e| e.gre_geo),
            gc_gsp: summary(|e| e.gc_gsp),
            gre_gsp: summary(|e| e.gre_gsp),
            ok: evals.len(),
            failed: realizations.len() - evals.len(),
            disconnected: evals.iter().filter(|e| e.disconnected).count(),
            error: realizations.iter().find_map(|r| r.error.clone()),
            realizations,
        }
    }

    pub fn evaluations(&self) -> impl Iterator<Item = &NetworkEvaluation> {
        self.realizations
            .iter()
            .filter_map(|r| r.evaluation.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub config: GridConfig,
    pub cells: Vec<HeatmapCell>,
}

/// Runs every cell × realization of the sweep. Failures (e.g. GC undefined,
/// path cap exceeded) are recorded in their cell.
pub fn run_grid(config: &GridConfig) -> Result<GridResult> {
    config.validate()?;
    let cells = config.cells();
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.realizations).map(move |r| (c, r)))
        .collect();
    let records: Vec<RealizationRecord> = tasks
        .par_iter()
        .map(|&(c, r)| {
            let params = config.params(&cells[c], r);
            let outcome = generate(&params).and_then(|net| evaluate_network(&net, config.path_cap));
            match outcome {
                Ok(e) => RealizationRecord {
                    realization: r,
                    seed: params.seed,
                    evaluation: Some(e),
                    error: None,
                },
                Err(e) => {
                    log::warn!(
                        "cell d={} gamma={} T={} realization {r}: {e}",
                        cells[c].dbar,
                        cells[c].gamma,
                        cells[c].temperature
                    );
                    RealizationRecord {
                        realization: r,
                        seed: params.seed,
                        evaluation: None,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    let mut records = records.into_iter();
    let cells = cells
        .into_iter()
        .map(|coords| {
            HeatmapCell::from_records(coords, records.by_ref().take(config.realizations).collect())
        })
        .collect();
    Ok(GridResult {
        config: config.clone(),
        cells,
    })
}

impl GridResult {
    pub fn cell(&self, dbar: u32, gamma: f64, temperature: f64) -> Option<&HeatmapCell> {
        self.cells.iter().find(|c| {
            c.coords.dbar == dbar && c.coords.gamma == gamma && c.coords.temperature == temperature
        })
    }

    /// Long-form table, one row per cell and metric, preceded by a `#` line
    /// holding the resolved configuration.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# config: {}\n",
            serde_json::to_string(&self.config).unwrap()
        );
        out.push_str("dbar,m,gamma,T,C,metric,mean,std,ok,failed,disconnected,error\n");
        for cell in &self.cells {
            let c = &cell.coords;
            for (name, summary) in [
                ("gc_geo", cell.gc_geo),
                ("gre_geo", cell.gre_geo),
                ("gc_gsp", cell.gc_gsp),
                ("gre_gsp", cell.gre_gsp),
            ] {
                let (mean, std) = summary.map_or((String::new(), String::new()), |s| {
                    (s.mean.to_string(), s.std.to_string())
                });
                let error = cell.error.as_deref().unwrap_or("").replace(['"', ','], " ");
                writeln!(
                    out,
                    "{},{},{},{},{},{name},{mean},{std},{},{},{},{error}",
                    c.dbar,
                    c.m,
                    c.gamma,
                    c.temperature,
                    c.communities,
                    cell.ok,
                    cell.failed,
                    cell.disconnected
                )
                .unwrap();
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }
}

/// Pairs of one TSP hop class inside a p̄TSP distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopClass {
    pub hops: u32,
    pub pairs: usize,
    pub mean_ptsp: f64,
    /// Location of the p̄TSP density maximum within this class's value range.
    pub mode: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionComparison {
    pub params: NpsoParams,
    pub nodes_used: usize,
    pub disconnected: bool,
    pub geo: Vec<f64>,
    pub ptsp: Vec<f64>,
    pub kde_geo: KdeCurve,
    pub kde_ptsp: KdeCurve,
    pub mwu: MwuResult,
    pub hop_classes: Vec<HopClass>,
    pub axiom_violations: usize,
}

impl DistributionComparison {
    /// The hop class holding the most pairs.
    pub fn dominant_class(&self) -> Option<&HopClass> {
        self.hop_classes
            .iter()
            .max_by_key(|c| (c.pairs, std::cmp::Reverse(c.hops)))
    }
}

/// Pooled GEO and p̄TSP samples over the nonadjacent pairs of one network,
/// their densities, and a Mann-Whitney comparison.
pub fn run_distribution_compare(
    params: &NpsoParams,
    cap: Option<usize>,
) -> Result<DistributionComparison> {
    let (net, disconnected) = giant_view(generate(params)?);
    let (_, _, pairs) = pair_set_of(&net, cap)?;
    if pairs.records.is_empty() {
        return Err(Error::Domain("no nonadjacent pairs to compare".into()));
    }
    let geo: Vec<f64> = pairs.records.iter().map(|r| r.geo.unwrap()).collect();
    let ptsp: Vec<f64> = pairs.records.iter().map(|r| r.mean_ptsp).collect();
    let kde_geo = kde(&geo, DEFAULT_GRID_SIZE)?;
    let kde_ptsp = kde(&ptsp, DEFAULT_GRID_SIZE)?;
    let mwu = mann_whitney(&geo, &ptsp)?;

    let max_hops = pairs.records.iter().map(|r| r.tsp_len).max().unwrap_or(0);
    let mut hop_classes = Vec::new();
    for hops in 2..=max_hops {
        let values: Vec<f64> = pairs
            .records
            .iter()
            .filter(|r| r.tsp_len == hops)
            .map(|r| r.mean_ptsp)
            .collect();
        if values.is_empty() {
            continue;
        }
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        let mode = kde_ptsp
            .grid
            .iter()
            .zip(&kde_ptsp.density)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or((lo + hi) / 2.0, |(x, _)| *x);
        hop_classes.push(HopClass {
            hops,
            pairs: values.len(),
            mean_ptsp: values.iter().sum::<f64>() / values.len() as f64,
            mode,
        });
    }
    Ok(DistributionComparison {
        params: *params,
        nodes_used: net.graph.node_count(),
        disconnected,
        axiom_violations: pair_axiom_violations(&pairs, AXIOM_TOLERANCE),
        geo,
        ptsp,
        kde_geo,
        kde_ptsp,
        mwu,
        hop_classes,
    })
}

/// One network configuration of the distribution comparison preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionPanel {
    /// e.g. `a:dbar=4`.
    pub label: String,
    pub dbar: u32,
    pub params: NpsoParams,
}

/// The nine configurations of the distribution preset (each with C = 0 and
/// C = 4), N = 100: d̄ ∈ {4, 12, 20} at T = 0.5, γ = 2.5; γ ∈ {2, 2.5, 3} at
/// d̄ = 12, T = 0.5; T ∈ {0.1, 0.5, 0.9} at d̄ = 12, γ = 2.5.
pub fn fig2_panels(base_seed: u64) -> Vec<DistributionPanel> {
    let mut configs: Vec<(String, u32, f64, f64)> = Vec::new();
    for dbar in [4, 12, 20] {
        configs.push((format!("a:dbar={dbar}"), dbar, 0.5, 2.5));
    }
    for gamma in [2.0, 2.5, 3.0] {
        configs.push((format!("b:gamma={gamma}"), 12, 0.5, gamma));
    }
    for t in [0.1, 0.5, 0.9] {
        configs.push((format!("c:T={t}"), 12, t, 2.5));
    }
    let mut panels = Vec::new();
    for (label, dbar, t, gamma) in configs {
        for c in [0usize, 4] {
            panels.push(DistributionPanel {
                label: format!("{label}:C={c}"),
                dbar,
                params: NpsoParams {
                    n: 100,
                    m: m_for_dbar(dbar),
                    temperature: t,
                    gamma,
                    communities: c,
                    seed: mix_seed(&[
                        base_seed,
                        dbar as u64,
                        hundredths(gamma),
                        hundredths(t),
                        c as u64,
                        0,
                    ]),
                },
            });
        }
    }
    panels
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelResult {
    pub panel: DistributionPanel,
    pub comparison: Option<DistributionComparison>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub path_cap: Option<usize>,
    pub panels: Vec<PanelResult>,
}

pub fn run_distributions(panels: &[DistributionPanel], cap: Option<usize>) -> DistributionReport {
    let results = panels
        .par_iter()
        .map(|panel| match run_distribution_compare(&panel.params, cap) {
            Ok(c) => PanelResult {
                panel: panel.clone(),
                comparison: Some(c),
                error: None,
            },
            Err(e) => PanelResult {
                panel: panel.clone(),
                comparison: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    DistributionReport {
        path_cap: cap,
        panels: results,
    }
}

impl DistributionReport {
    /// Plot-ready density table: `panel,series,x,density`.
    pub fn kde_csv(&self) -> String {
        let mut out = String::from("panel,series,x,density\n");
        for p in &self.panels {
            let Some(c) = &p.comparison else { continue };
            for (series, curve) in [("geo", &c.kde_geo), ("ptsp", &c.kde_ptsp)] {
                for (x, d) in curve.grid.iter().zip(&curve.density) {
                    writeln!(out, "{},{series},{x},{d}", p.panel.label).unwrap();
                }
            }
        }
        out
    }

    /// One row per panel: sample sizes, Mann-Whitney result, hop classes.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("panel,N,m,T,gamma,C,seed,pairs,u_statistic,p_value,hop_classes,error\n");
        for p in &self.panels {
            let q = &p.panel.params;
            let (pairs, u, pv, classes) = match &p.comparison {
                Some(c) => (
                    c.geo.len().to_string(),
                    c.mwu.u_statistic.to_string(),
                    c.mwu.p_value.to_string(),
                    c.hop_classes
                        .iter()
                        .map(|h| format!("{}:{}", h.hops, h.pairs))
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
                None => Default::default(),
            };
            let err = p.error.as_deref().unwrap_or("").replace(['"', ','], " ");
            writeln!(
                out,
                "{},{},{},{},{},{},{},{pairs},{u},{pv},{classes},{err}",
                p.panel.label, q.n, q.m, q.temperature, q.gamma, q.communities, q.seed
            )
            .unwrap();
        }
        out
    }
}

/// Connectome group comparison together with what was loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectomeReport {
    pub manifest: String,
    pub subjects_loaded: usize,
    pub skipped: Vec<SkippedSubject>,
    pub comparison: GroupComparison,
}

impl ConnectomeReport {
    /// `subject_id,group,gc,nodes,nodes_used,excluded_pairs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subject_id,group,gc,nodes,nodes_used,excluded_pairs\n");
        for g in [&self.comparison.group_a, &self.comparison.group_b] {
            for s in &g.subjects {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.id, g.label, s.gc, s.nodes, s.nodes_used, s.excluded_pairs
                )
                .unwrap();
            }
        }
        out
    }
}

pub fn run_connectome(
    manifest: &Path,
    label_key: &str,
    label_a: &str,
    label_b: &str,
    cap: Option<usize>,
) -> Result<ConnectomeReport> {
    let (subjects, skipped) = load_subjects(manifest)?;
    let comparison = group_compare(&subjects, label_key, label_a, label_b, cap)?;
    Ok(ConnectomeReport {
        manifest: manifest.display().to_string(),
        subjects_loaded: subjects.len(),
        skipped,
        comparison,
    })
}

/// Synthetic cohort of nPSO-derived weighted networks, one group per γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n: usize,
    pub m: usize,
    pub temperature: f64,
    pub communities: usize,
    pub gammas: Vec<f64>,
    pub subjects_per_group: usize,
    pub base_seed: u64,
}

/// Writes one strength matrix per subject plus `manifest.csv`
/// (`subject_id,file,gamma`) into `dir`, returning the manifest path.
/// Strengths are chosen so that reversing them gives back the geodesic edge
/// lengths up to a global scale.
pub fn write_synthetic_cohort(dir: &Path, spec: &CohortSpec) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::from("subject_id,file,gamma\n");
    for &gamma in &spec.gammas {
        for k in 0..spec.subjects_per_group {
            let params = NpsoParams {
                n: spec.n,
                m: spec.m,
                temperature: spec.temperature,
                gamma,
                communities: spec.communities,
                seed: mix_seed(&[spec.base_seed, hundredths(gamma), k as u64]),
            };
            let net = generate(&params)?;
            let matrix = StrengthMatrix::from_distances(&net.geodesic_weighted());
            let id = format!("g{}_{k:03}", hundredths(gamma));
            let file = format!("{id}.csv");
            matrix.write_csv(&dir.join(&file))?;
            writeln!(manifest, "{id},{file},{gamma}").unwrap();
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest)?;
    Ok(path)
}
