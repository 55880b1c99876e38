//! Weighted connectomes: strength matrices, weight reversal into distances,
//! per-subject GC(GSP) and two-group comparison.
//!
//! Input layout: one square CSV matrix per subject (no header, comma
//! separated, streamline counts or any nonnegative strength) and a manifest
//! CSV whose first two columns are `subject_id,file`; every further column is
//! a label (e.g. `gender`, `age`). Files are resolved relative to the
//! manifest. A zero entry is a missing edge.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metrics::{gc, Reference};
use crate::paths::pair_records;
use crate::stats::{kde, mann_whitney, KdeCurve, MwuResult, DEFAULT_GRID_SIZE};

/// Relative tolerance accepted between `w(i,j)` and `w(j,i)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Symmetric nonnegative strength matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthMatrix {
    n: usize,
    w: Vec<f64>,
}

impl StrengthMatrix {
    /// Validates and symmetrizes a row-major matrix. Entries that differ from
    /// their transpose by more than [`SYMMETRY_TOLERANCE`] (relative) are
    /// rejected; smaller differences are averaged. The diagonal is zeroed.
    pub fn new(n: usize, mut w: Vec<f64>) -> Result<Self> {
        if w.len() != n * n {
            return Err(Error::Data(format!(
                "matrix has {} entries, expected {}x{n}",
                w.len(),
                n
            )));
        }
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Data(format!(
                "strengths must be finite and nonnegative, found {bad}"
            )));
        }
        let mut self_weights = 0;
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                self_weights += 1;
                w[i * n + i] = 0.0;
            }
            for j in (i + 1)..n {
                let a = w[i * n + j];
                let b = w[j * n + i];
                if (a - b).abs() > SYMMETRY_TOLERANCE * a.abs().max(b.abs()) {
                    return Err(Error::Data(format!(
                        "matrix is asymmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                let avg = (a + b) / 2.0;
                w[i * n + j] = avg;
                w[j * n + i] = avg;
            }
        }
        if self_weights > 0 {
            log::warn!("ignoring {self_weights} self-connection weights");
        }
        Ok(Self { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut data = Vec::new();
        let mut rows = 0;
        for rec in reader.records() {
            let rec = rec?;
            for field in rec.iter() {
                let x: f64 = field.parse().map_err(|_| {
                    Error::Data(format!("{}: not a number: '{field}'", path.display()))
                })?;
                data.push(x);
            }
            rows += 1;
        }
        if rows * rows != data.len() {
            return Err(Error::Data(format!(
                "{}: matrix is not square",
                path.display()
            )));
        }
        Self::new(rows, data)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Strengths whose reversal reproduces `distances` up to one global scale:
    /// `w = 2 d_max / d - 1`, so `1/(1+w) = d / (2 d_max)`.
    pub fn from_distances(distances: &WeightedGraph) -> Self {
        let n = distances.node_count();
        let g = distances.graph();
        let d_max = g
            .edges()
            .map(|(u, v)| distances.weight(u, v).unwrap())
            .fold(0.0, f64::max);
        let mut w = vec![0.0; n * n];
        for (u, v) in g.edges() {
            let s = 2.0 * d_max / distances.weight(u, v).unwrap() - 1.0;
            w[u * n + v] = s;
            w[v * n + u] = s;
        }
        Self { n, w }
    }
}

/// `w* = 1 / (1 + w)`.
pub fn reverse_weight(strength: f64) -> f64 {
    1.0 / (1.0 + strength)
}

/// Distance graph from a strength matrix: each nonzero entry becomes an edge
/// of length `1/(1+w)`.
pub fn reverse_weights(matrix: &StrengthMatrix) -> Result<WeightedGraph> {
    let n = matrix.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = matrix.get(i, j);
            if w < 0.0 {
                return Err(Error::Data(format!("negative strength {w} at ({i}, {j})")));
            }
            if w > 0.0 {
                edges.push((i, j, reverse_weight(w)));
            }
        }
    }
    WeightedGraph::from_edges(n, edges)
}

/// Distance graph from an explicit edge list, where a zero strength still
/// marks a present edge (length 1).
pub fn reverse_edge_list(n: usize, edges: &[(usize, usize, f64)]) -> Result<WeightedGraph> {
    if let Some(&(i, j, w)) = edges.iter().find(|e| e.2.is_nan() || e.2 < 0.0) {
        return Err(Error::Data(format!("negative strength {w} at ({i}, {j})")));
    }
    WeightedGraph::from_edges(n, edges.iter().map(|&(i, j, w)| (i, j, reverse_weight(w))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectNetwork {
    pub id: String,
    pub labels: BTreeMap<String, String>,
    pub matrix: StrengthMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectGc {
    pub id: String,
    pub gc: f64,
    pub nodes: usize,
    /// Nodes in the analysed (giant) component.
    pub nodes_used: usize,
    pub pairs: usize,
    /// Nonadjacent pairs dropped because they straddle components.
    pub excluded_pairs: usize,
}

/// GC(p̄TSP, GSP) of one subject on its reversed-weight graph. Disconnected
/// subjects are reduced to their giant component.
pub fn subject_gc(subject: &SubjectNetwork, cap: Option<usize>) -> Result<SubjectGc> {
    let full = reverse_weights(&subject.matrix)?;
    let n = full.node_count();
    let (graph, excluded_pairs) = if full.graph().is_connected() {
        (full, 0)
    } else {
        let giant = full.graph().giant_component();
        let sub = full.induced(&giant);
        let excluded = full.graph().nonadjacent_pairs() - sub.graph().nonadjacent_pairs();
        log::warn!(
            "subject {}: disconnected, using giant component of {} of {n} nodes ({excluded} pairs excluded)",
            subject.id,
            giant.len()
        );
        (sub, excluded)
    };
    let pairs = pair_records(&graph, None, cap)?;
    let report = gc(&pairs, Reference::Gsp)?;
    Ok(SubjectGc {
        id: subject.id.clone(),
        gc: report.gc,
        nodes: n,
        nodes_used: graph.node_count(),
        pairs: report.n_pairs,
        excluded_pairs,
    })
}

/// Selects subjects by label: an exact string, or an inclusive numeric
/// range written `lo-hi` (e.g. `7-30`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LabelMatcher {
    Exact(String),
    Range(f64, f64),
}

impl LabelMatcher {
    pub fn parse(s: &str) -> Self {
        if let Some((lo, hi)) = s.split_once('-') {
            if let (Ok(lo), Ok(hi)) = (lo.trim().parse::<f64>(), hi.trim().parse::<f64>()) {
                if lo <= hi {
                    return LabelMatcher::Range(lo, hi);
                }
            }
        }
        LabelMatcher::Exact(s.to_string())
    }

    pub fn matches(&self, value: &str) -> bool {
        match self {
            LabelMatcher::Exact(s) => s == value,
            LabelMatcher::Range(lo, hi) => value
                .trim()
                .parse::<f64>()
                .is_ok_and(|x| *lo <= x && x <= *hi),
        }
    }
}

impl fmt::Display for LabelMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelMatcher::Exact(s) => f.write_str(s),
            LabelMatcher::Range(lo, hi) => write!(f, "{lo}-{hi}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub subjects: Vec<SubjectGc>,
}

impl GroupSummary {
    pub fn gc_values(&self) -> Vec<f64> {
        self.subjects.iter().map(|s| s.gc).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub label_key: String,
    pub group_a: GroupSummary,
    pub group_b: GroupSummary,
    pub mwu: MwuResult,
    /// `None` when a group has fewer than two distinct GC values.
    pub kde_a: Option<KdeCurve>,
    pub kde_b: Option<KdeCurve>,
}

/// Splits subjects by `label_key` into the groups matching `label_a` and
/// `label_b`, computes GC(GSP) per subject and compares the groups.
pub fn group_compare(
    subjects: &[SubjectNetwork],
    label_key: &str,
    label_a: &str,
    label_b: &str,
    cap: Option<usize>,
) -> Result<GroupComparison> {
    if !subjects.iter().any(|s| s.labels.contains_key(label_key)) {
        return Err(Error::Usage(format!(
            "no subject carries the label '{label_key}'"
        )));
    }
    let select = |label: &str| -> Result<Vec<&SubjectNetwork>> {
        let matcher = LabelMatcher::parse(label);
        let chosen: Vec<_> = subjects
            .iter()
            .filter(|s| s.labels.get(label_key).is_some_and(|v| matcher.matches(v)))
            .collect();
        if chosen.is_empty() {
            return Err(Error::Usage(format!(
                "no subject has {label_key} = {label}"
            )));
        }
        Ok(chosen)
    };
    let a = select(label_a)?;
    let b = select(label_b)?;
    let run = |group: Vec<&SubjectNetwork>| -> Result<Vec<SubjectGc>> {
        group
            .into_par_iter()
            .map(|s| subject_gc(s, cap))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    };
    let group_a = GroupSummary {
        label: label_a.to_string(),
        subjects: run(a)?,
    };
    let group_b = GroupSummary {
        label: label_b.to_string(),
        subjects: run(b)?,
    };
    let (va, vb) = (group_a.gc_values(), group_b.gc_values());
    let mwu = mann_whitney(&va, &vb)?;
    Ok(GroupComparison {
        label_key: label_key.to_string(),
        kde_a: kde(&va, DEFAULT_GRID_SIZE).ok(),
        kde_b: kde(&vb, DEFAULT_GRID_SIZE).ok(),
        group_a,
        group_b,
        mwu,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: PathBuf,
    pub labels: BTreeMap<String, String>,
}

/// Reads a manifest; `file` paths come back resolved against its directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Data(
            "manifest needs at least the columns subject_id,file".into(),
        ));
    }
    let mut entries = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let labels = headers
            .iter()
            .zip(rec.iter())
            .skip(2)
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        entries.push(ManifestEntry {
            id: rec[0].to_string(),
            file: base.join(&rec[1]),
            labels,
        });
    }
    Ok(entries)
}

/// A manifest entry that could not be loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSubject {
    pub id: String,
    pub reason: String,
}

/// Loads every subject of a manifest; unreadable matrices are skipped and reported.
pub fn load_subjects(manifest: &Path) -> Result<(Vec<SubjectNetwork>, Vec<SkippedSubject>)> {
    let mut subjects = Vec::new();
    let mut skipped = Vec::new();
    for entry in read_manifest(manifest)? {
        match StrengthMatrix::read_csv(&entry.file) {
            Ok(matrix) => subjects.push(SubjectNetwork {
                id: entry.id,
                labels: entry.labels,
                matrix,
            }),
            Err(e) => {
                log::warn!("skipping subject {}: {e}", entry.id);
                skipped.push(SkippedSubject {
                    id: entry.id,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok((subjects, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(n: usize, edges: &[(usize, usize, f64)]) -> StrengthMatrix {
        let mut w = vec![0.0; n * n];
        for &(i, j, x) in edges {
            w[i * n + j] = x;
            w[j * n + i] = x;
        }
        StrengthMatrix::new(n, w).unwrap()
    }

    fn subject(id: &str, labels: &[(&str, &str)], m: StrengthMatrix) -> SubjectNetwork {
        SubjectNetwork {
            id: id.into(),
            labels: labels
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            matrix: m,
        }
    }

    #[test]
    fn reversal_formula() {
        assert_eq!(reverse_weight(0.0), 1.0);
        assert_eq!(reverse_weight(1.0), 0.5);
        assert!((reverse_weight(9.0) - 0.1).abs() < 1e-15);
        let g = reverse_edge_list(2, &[(0, 1, 0.0)]).unwrap();
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert!(reverse_edge_list(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn zero_entries_are_nonedges() {
        let g = reverse_weights(&matrix(3, &[(0, 1, 9.0)])).unwrap();
        assert_eq!(g.graph().edge_count(), 1);
        assert!((g.weight(0, 1).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn matrix_validation() {
        assert!(StrengthMatrix::new(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(StrengthMatrix::new(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
        assert!(StrengthMatrix::new(2, vec![0.0, 1.0, 1.0]).is_err());
        let m = StrengthMatrix::new(2, vec![5.0, 1.0, 1.0 + 1e-12, 0.0]).unwrap();
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    // 6-node fixture: hexagon 0-1-2-3-4-5-0 plus chord 0-3.
    // Strengths chosen so reversed lengths are simple fractions.
    fn hexagon() -> StrengthMatrix {
        matrix(
            6,
            &[
                (0, 1, 1.0), // 0.5
                (1, 2, 1.0), // 0.5
                (2, 3, 3.0), // 0.25
                (3, 4, 1.0), // 0.5
                (4, 5, 1.0), // 0.5
                (5, 0, 3.0), // 0.25
                (0, 3, 0.0), // absent
            ],
        )
    }

    #[test]
    fn subject_gc_matches_hand_enumeration() {
        // Every GSP is also a TSP here (9 nonadjacent pairs):
        // (0,2): TSP 0-1-2 = 1.0; GSP 1.0             -> 1
        // (0,3): TSPs 0-1-2-3 = 1.25, 0-5-4-3 = 1.25   -> 1
        // (0,4): TSP 0-5-4 = 0.75; GSP 0.75           -> 1
        // (1,3): TSP 1-2-3 = 0.75                     -> 1
        // (1,4): TSPs 1-2-3-4 = 1.25, 1-0-5-4 = 1.25  -> 1
        // (1,5): TSP 1-0-5 = 0.75                     -> 1
        // (2,4): TSP 2-3-4 = 0.75                     -> 1
        // (2,5): TSPs 2-1-0-5 = 1.25, 2-3-4-5 = 1.25  -> 1
        // (3,5): TSP 3-4-5 = 1.0                      -> 1
        let s = subject("hex", &[], hexagon());
        let r = subject_gc(&s, None).unwrap();
        assert_eq!(r.pairs, 9);
        assert!((r.gc - 1.0).abs() < 1e-12);

        // Same hexagon plus a long chord 1-4 (strength 0.25, length 0.8).
        let mut m = vec![0.0; 36];
        for (i, j, w) in [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 3, 3.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (5, 0, 3.0),
            (1, 4, 0.25),
        ] {
            m[i * 6 + j] = w;
            m[j * 6 + i] = w;
        }
        let s = subject("hex2", &[], StrengthMatrix::new(6, m).unwrap());
        let r = subject_gc(&s, None).unwrap();
        // nonadjacent pairs: 15 - 7 = 8
        //  (0,2): 0-1-2 = 1.0, GSP 1.0                         -> 1
        //  (0,3): TSPs 0-1-2-3 = 1.25, 0-5-4-3 = 1.25, 0-1-4-3 = 1.8; mean 4.3/3; GSP 1.25
        //  (0,4): TSPs 0-1-4 = 1.3, 0-5-4 = 0.75; mean 1.025; GSP 0.75
        //  (1,3): TSPs 1-2-3 = 0.75, 1-4-3 = 1.3; mean 1.025; GSP 0.75
        //  (1,5): TSPs 1-0-5 = 0.75, 1-4-5 = 1.3; mean 1.025; GSP 0.75
        //  (2,4): TSPs 2-3-4 = 0.75, 2-1-4 = 1.3; mean 1.025; GSP 0.75
        //  (2,5): TSPs 2-1-0-5 = 1.25, 2-3-4-5 = 1.25, 2-1-4-5 = 1.8; mean 4.3/3; GSP 1.25
        //  (3,5): 3-4-5 = 1.0, GSP 1.0                         -> 1
        let expected = (1.0 + 2.0 * (1.25 / (4.3 / 3.0)) + 4.0 * (0.75 / 1.025) + 1.0) / 8.0;
        assert_eq!(r.pairs, 8);
        assert!((r.gc - expected).abs() < 1e-12, "{} vs {expected}", r.gc);
    }

    #[test]
    fn disconnected_subject_uses_giant_component() {
        let m = matrix(
            7,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 5.0),
                (3, 0, 2.0),
                (5, 6, 1.0),
            ],
        );
        let s = subject("split", &[], m);
        let r = subject_gc(&s, None).unwrap();
        assert_eq!(r.nodes, 7);
        assert_eq!(r.nodes_used, 4);
        // 21 - 5 edges = 16 nonadjacent pairs in total, 2 inside the giant component
        assert_eq!(r.excluded_pairs, 14);
        let direct = subject(
            "giant",
            &[],
            matrix(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0), (3, 0, 2.0)]),
        );
        assert_eq!(subject_gc(&direct, None).unwrap().gc, r.gc);
    }

    #[test]
    fn relabeling_invariance() {
        let base = [
            (0, 1, 1.0),
            (1, 2, 4.0),
            (2, 3, 1.0),
            (3, 4, 2.0),
            (4, 0, 7.0),
            (1, 3, 0.5),
            (4, 5, 3.0),
        ];
        let perm = [3, 5, 0, 1, 4, 2];
        let relabeled: Vec<_> = base
            .iter()
            .map(|&(i, j, w)| (perm[i], perm[j], w))
            .collect();
        let a = subject_gc(&subject("a", &[], matrix(6, &base)), None).unwrap();
        let b = subject_gc(&subject("b", &[], matrix(6, &relabeled)), None).unwrap();
        assert!((a.gc - b.gc).abs() < 1e-12);
    }

    #[test]
    fn label_matching() {
        assert_eq!(LabelMatcher::parse("7-30"), LabelMatcher::Range(7.0, 30.0));
        assert!(LabelMatcher::parse("7-30").matches("30"));
        assert!(!LabelMatcher::parse("7-30").matches("31"));
        assert!(!LabelMatcher::parse("7-30").matches("F"));
        assert_eq!(LabelMatcher::parse("F"), LabelMatcher::Exact("F".into()));
    }

    #[test]
    fn duplicated_groups_are_indistinguishable() {
        let mut subjects = Vec::new();
        for (k, w) in [1.0, 2.0, 5.0, 9.0, 0.5].iter().enumerate() {
            let m = matrix(
                5,
                &[
                    (0, 1, *w),
                    (1, 2, 1.0),
                    (2, 3, 2.0),
                    (3, 4, 1.0),
                    (4, 0, 3.0),
                    (1, 3, 4.0),
                ],
            );
            subjects.push(subject(&format!("a{k}"), &[("group", "A")], m.clone()));
            subjects.push(subject(&format!("b{k}"), &[("group", "B")], m));
        }
        let cmp = group_compare(&subjects, "group", "A", "B", None).unwrap();
        assert!(cmp.mwu.p_value > 0.9);
        assert_eq!(cmp.group_a.subjects.len(), 5);
        assert!(cmp
            .group_a
            .gc_values()
            .iter()
            .all(|g| (0.0..=1.0).contains(g)));
        assert!(matches!(
            group_compare(&subjects, "group", "A", "C", None),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            group_compare(&subjects, "sex", "A", "B", None),
            Err(Error::Usage(_))
        ));
    }

    proptest! {
        #[test]
        fn reversal_strictly_decreasing(a in 0.0f64..1e6, b in 0.0f64..1e6) {
            prop_assume!(a < b);
            prop_assert!(reverse_weight(a) > reverse_weight(b));
        }
    }
}
