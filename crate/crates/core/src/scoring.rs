//! Cross-tool standardisation and the weighted composite score.
//!
//! For one benchmark, each metric column is z-scored across all complete
//! tool rows, and each tool's score is `sum(w_m * z_m) / sum(|w_m|)`. With
//! the default weights `(3, -1, -1, -1)` SM is rewarded and IFN, ICP, NED
//! are penalised.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Metric column order used throughout: SM, IFN, ICP, NED.
pub const METRIC_NAMES: [&str; 4] = ["sm", "ifn", "icp", "ned"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("need at least 2 complete rows to standardise, got {0}")]
    TooFewRows(usize),
    #[error("weight vector must have at least one non-zero weight")]
    ZeroWeights,
    #[error("weights must be finite")]
    NonFiniteWeight,
}

/// One tool's raw metric values on one benchmark.
///
/// A metric may be missing (a blank cell in a published table); such rows
/// are excluded from scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub tool: String,
    pub sm: Option<f64>,
    pub ifn: Option<f64>,
    pub icp: Option<f64>,
    pub ned: Option<f64>,
    pub micro: Option<u32>,
}

impl MetricRow {
    pub fn complete(tool: impl Into<String>, values: [f64; 4], micro: Option<u32>) -> Self {
        let [sm, ifn, icp, ned] = values;
        Self {
            tool: tool.into(),
            sm: Some(sm),
            ifn: Some(ifn),
            icp: Some(icp),
            ned: Some(ned),
            micro,
        }
    }

    /// `[SM, IFN, ICP, NED]` if every metric is present.
    pub fn values(&self) -> Option<[f64; 4]> {
        Some([self.sm?, self.ifn?, self.icp?, self.ned?])
    }

    pub fn is_complete(&self) -> bool {
        self.values().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub sm: f64,
    pub ifn: f64,
    pub icp: f64,
    pub ned: f64,
}

impl Default for WeightVector {
    fn default() -> Self {
        Self {
            sm: 3.0,
            ifn: -1.0,
            icp: -1.0,
            ned: -1.0,
        }
    }
}

impl WeightVector {
    pub fn new(sm: f64, ifn: f64, icp: f64, ned: f64) -> Result<Self, ScoringError> {
        let w = Self { sm, ifn, icp, ned };
        w.check()?;
        Ok(w)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.sm, self.ifn, self.icp, self.ned]
    }

    pub fn abs_sum(&self) -> f64 {
        self.as_array().iter().map(|w| w.abs()).sum()
    }

    fn check(&self) -> Result<(), ScoringError> {
        if self.as_array().iter().any(|w| !w.is_finite()) {
            return Err(ScoringError::NonFiniteWeight);
        }
        if self.abs_sum() == 0.0 {
            return Err(ScoringError::ZeroWeights);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdConvention {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

/// Column-wise z-scores for a set of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZMatrix {
    pub mean: [f64; 4],
    pub std: [f64; 4],
    pub z: Vec<[f64; 4]>,
}

/// Standardises each metric column. A column with zero spread gets z = 0.
pub fn zscore_columns(rows: &[[f64; 4]], convention: StdConvention) -> Result<ZMatrix, ScoringError> {
    let n = rows.len();
    if n < 2 {
        return Err(ScoringError::TooFewRows(n));
    }
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for m in 0..4 {
        let mu = rows.iter().map(|r| r[m]).sum::<f64>() / n as f64;
        let ss: f64 = rows.iter().map(|r| (r[m] - mu).powi(2)).sum();
        let denom = match convention {
            StdConvention::Population => n as f64,
            StdConvention::Sample => (n - 1) as f64,
        };
        mean[m] = mu;
        std[m] = (ss / denom).sqrt();
    }
    let z = rows
        .iter()
        .map(|r| {
            let mut out = [0.0; 4];
            for m in 0..4 {
                // Spread below rounding noise of the mean is treated as constant.
                if std[m] > f64::EPSILON * mean[m].abs().max(1.0) {
                    out[m] = (r[m] - mean[m]) / std[m];
                }
            }
            out
        })
        .collect();
    Ok(ZMatrix { mean, std, z })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTool {
    pub tool: String,
    pub raw: [f64; 4],
    pub micro: Option<u32>,
    pub z: [f64; 4],
    pub score: f64,
}

/// Composite scores of every complete row of one benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub benchmark: String,
    pub convention: StdConvention,
    pub weights: WeightVector,
    pub mean: [f64; 4],
    pub std: [f64; 4],
    /// Scored tools in input order.
    pub scored: Vec<ScoredTool>,
    /// Tools left out because a metric was missing.
    pub not_scored: Vec<String>,
}

pub fn composite_scores(
    benchmark: impl Into<String>,
    rows: &[MetricRow],
    weights: &WeightVector,
    convention: StdConvention,
) -> Result<ScoreTable, ScoringError> {
    weights.check()?;
    let (complete, incomplete): (Vec<&MetricRow>, Vec<&MetricRow>) = rows.iter().partition(|r| r.is_complete());
    let raw: Vec<[f64; 4]> = complete.iter().filter_map(|r| r.values()).collect();
    let zm = zscore_columns(&raw, convention)?;
    let w = weights.as_array();
    let norm = weights.abs_sum();

    let scored = complete
        .iter()
        .zip(raw.iter().zip(&zm.z))
        .map(|(row, (raw, z))| ScoredTool {
            tool: row.tool.clone(),
            raw: *raw,
            micro: row.micro,
            z: *z,
            score: (0..4).map(|m| w[m] * z[m]).sum::<f64>() / norm,
        })
        .collect();

    Ok(ScoreTable {
        benchmark: benchmark.into(),
        convention,
        weights: *weights,
        mean: zm.mean,
        std: zm.std,
        scored,
        not_scored: incomplete.iter().map(|r| r.tool.clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTool {
    pub rank: usize,
    pub tool: String,
    pub score: f64,
}

/// Orders tools by descending score, ties broken by tool name. Ranks run
/// 1..=n without gaps or shared positions.
pub fn rank_table(table: &ScoreTable) -> Vec<RankedTool> {
    let mut order: Vec<&ScoredTool> = table.scored.iter().collect();
    order.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.tool.cmp(&b.tool))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(i, t)| RankedTool {
            rank: i + 1,
            tool: t.tool.clone(),
            score: t.score,
        })
        .collect()
}

/// Fractional ranks (ties share the average position), 1-based.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation, computed as the Pearson correlation of the
/// average ranks. Returns `None` for fewer than two points, mismatched
/// lengths, or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
