//! Gaussian kernel density estimation and the two-sided Mann-Whitney U test.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 512;

/// Density evaluated on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl KdeCurve {
    /// Grid points that are strict local maxima of the density (plateaus
    /// count once, at their left end).
    pub fn peaks(&self) -> Vec<f64> {
        let d = &self.density;
        let mut out = Vec::new();
        let mut i = 0;
        while i < d.len() {
            let mut j = i;
            while j + 1 < d.len() && d[j + 1] == d[i] {
                j += 1;
            }
            let left_lower = i == 0 || d[i - 1] < d[i];
            let right_lower = j + 1 == d.len() || d[j + 1] < d[i];
            if left_lower && right_lower && d[i] > 0.0 {
                out.push(self.grid[i]);
            }
            i = j + 1;
        }
        out
    }

    /// Trapezoidal integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Silverman's rule of thumb, `0.9 min(σ, IQR/1.34) n^(-1/5)`. When one of
/// the two spreads is zero the other is used.
pub fn silverman_bandwidth(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = (quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25)) / 1.34;
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr),
        (true, false) => sd,
        (false, true) => iqr,
        (false, false) => 0.0,
    };
    0.9 * spread * n.powf(-0.2)
}

/// Gaussian KDE on `grid_size` points spanning `[min - 3h, max + 3h]`.
pub fn kde(sample: &[f64], grid_size: usize) -> Result<KdeCurve> {
    if sample.len() < 2 {
        return Err(Error::Domain("KDE needs at least two observations".into()));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(
            "KDE sample contains non-finite values".into(),
        ));
    }
    if grid_size < 2 {
        return Err(Error::Domain("KDE grid needs at least two points".into()));
    }
    let h = silverman_bandwidth(sample);
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(
            "KDE bandwidth is zero (all observations equal)".into(),
        ));
    }
    let (min, max) = sample
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let lo = min - 3.0 * h;
    let hi = max + 3.0 * h;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let norm = 1.0 / (sample.len() as f64 * h * (2.0 * PI).sqrt());
    let grid: Vec<f64> = (0..grid_size).map(|k| lo + step * k as f64).collect();
    let density = grid
        .iter()
        .map(|&x| {
            norm * sample
                .iter()
                .map(|&xi| {
                    let u = (x - xi) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(KdeCurve {
        grid,
        density,
        bandwidth: h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwuResult {
    /// U statistic of the first sample.
    pub u_statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Midranks (1-based) of the pooled data plus the tie correction term
/// `Σ (t³ - t)` over tie groups.
fn midranks(pooled: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Mann-Whitney U test: normal approximation with tie-corrected
/// variance and a 0.5 continuity correction.
pub fn mann_whitney(sample1: &[f64], sample2: &[f64]) -> Result<MwuResult> {
    if sample1.is_empty() || sample2.is_empty() {
        return Err(Error::Domain(
            "Mann-Whitney test needs two nonempty samples".into(),
        ));
    }
    let n1 = sample1.len() as f64;
    let n2 = sample2.len() as f64;
    let pooled: Vec<f64> = sample1.iter().chain(sample2).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let r1: f64 = ranks[..sample1.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let p_value = if var > 0.0 {
        let z = ((u1 - mean).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / SQRT_2).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(MwuResult {
        u_statistic: u1,
        p_value,
        n1: sample1.len(),
        n2: sample2.len(),
    })
}
