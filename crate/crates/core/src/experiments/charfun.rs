use serde::{Deserialize, Serialize};

use super::{fit_line, ExperimentConfig};
use crate::criteria::Analysis;
use crate::error::Result;
use crate::gallery::{make_indicator, mollify, IndicatorShape};
use crate::partition::{DyadicPartition, PartitionKind};

/// Standard deviation of the mollifier in the contrast row.
const MOLLIFIER_WIDTH: f64 = 1.0 / 16.0;
/// Levels from which the flat-profile fit starts.
const FLAT_FROM: usize = 6;
/// Accepted `|slope|` of `log_2 ‖S_k 1_E‖_∞` against `k`.
const FLAT_TOLERANCE: f64 = 0.1;
/// The mollified pieces must shrink at least by this factor per level.
const DECAY_FACTOR: f64 = 0.5;
const DECAY_FROM: usize = 5;
/// Pieces below this share of the largest one are round-off.
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharfunRow {
    pub shape: String,
    pub k: usize,
    /// `‖S_k 1_E‖_∞`.
    pub sup_norm: f64,
    /// `(1+k) ‖S_k 1_E‖_∞`.
    pub weighted: f64,
    /// `Σ_{j≤k} (1+j)^{-b} ‖S_j 1_E‖_∞` for the first configured `b`.
    pub partial_sum: f64,
    /// `‖S_k (1_E * mollifier)‖_∞`.
    pub mollified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharfunSummary {
    pub label: String,
    pub shape: String,
    pub b: f64,
    /// Slope of `log_2 ‖S_k 1_E‖_∞` against `k` over `k ≥ 6`.
    pub flat_slope: f64,
    /// Slope of the partial sums against `k`.
    pub partial_growth: f64,
    /// Largest ratio of successive mollified pieces above the noise floor.
    pub contrast_ratio: f64,
    pub flat: bool,
    pub contrast_decays: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharfunTable {
    pub rows: Vec<CharfunRow>,
    pub summaries: Vec<CharfunSummary>,
}

impl CharfunTable {
    pub fn all_pass(&self) -> bool {
        self.summaries.iter().all(|s| s.pass)
    }
}

fn shape_name(shape: &IndicatorShape) -> String {
    match shape {
        IndicatorShape::Cube => "cube".into(),
        IndicatorShape::HalfSpace => "halfspace".into(),
        IndicatorShape::Rect { lo, hi } => format!("rect[{:?},{:?}]", lo, hi),
    }
}

/// Largest successive ratio `v_{k+1}/v_k` for `k ≥ from` until the values
/// fall under the noise floor; `INF` when fewer than two ratios are seen.
fn worst_decay_ratio(values: &[f64], from: usize) -> f64 {
    let top = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut worst = 0.0f64;
    let mut seen = 0;
    for k in from..values.len().saturating_sub(1) {
        if values[k + 1] <= NOISE_FLOOR * top {
            break;
        }
        worst = worst.max(values[k + 1] / values[k]);
        seen += 1;
    }
    if seen < 2 {
        f64::INFINITY
    } else {
        worst
    }
}

/// Littlewood-Paley sup norms of indicator functions, their weighted and
/// summed forms, and a mollified contrast.
pub fn run_charfun(config: &ExperimentConfig) -> Result<CharfunTable> {
    let grid = config.grid;
    let partition = DyadicPartition::build(grid, PartitionKind::Radial);
    let b = config.b_list.first().copied().unwrap_or(0.0);
    let per_shape = crate::par::map_slice(&config.shapes, |shape| -> Result<(Vec<CharfunRow>, CharfunSummary)> {
        let name = shape_name(shape);
        let indicator = make_indicator(grid, *shape)?;
        let sups = Analysis::new(&indicator, &partition)?.sup_norms().to_vec();
        let smooth = Analysis::new(&mollify(&indicator, MOLLIFIER_WIDTH), &partition)?.sup_norms().to_vec();
        let mut acc = 0.0;
        let rows: Vec<CharfunRow> = sups
            .iter()
            .zip(&smooth)
            .enumerate()
            .map(|(k, (&s, &m))| {
                let x = 1.0 + k as f64;
                acc += x.powf(-b) * s;
                CharfunRow { shape: name.clone(), k, sup_norm: s, weighted: x * s, partial_sum: acc, mollified: m }
            })
            .collect();
        let ks: Vec<f64> = (FLAT_FROM..rows.len()).map(|k| k as f64).collect();
        let logs: Vec<f64> = rows[FLAT_FROM..].iter().map(|r| r.sup_norm.log2()).collect();
        let flat_slope = fit_line(&ks, &logs)?.slope;
        let all_k: Vec<f64> = (0..rows.len()).map(|k| k as f64).collect();
        let partial: Vec<f64> = rows.iter().map(|r| r.partial_sum).collect();
        let partial_growth = fit_line(&all_k, &partial)?.slope;
        let contrast_ratio = worst_decay_ratio(&smooth, DECAY_FROM);
        let flat = flat_slope.abs() <= FLAT_TOLERANCE;
        let contrast_decays = contrast_ratio <= DECAY_FACTOR;
        let summary = CharfunSummary {
            label: format!("indicator of {name}: flat pieces, divergent sums; mollified pieces decay"),
            shape: name,
            b,
            flat_slope,
            partial_growth,
            contrast_ratio,
            flat,
            contrast_decays,
            pass: flat && contrast_decays && partial_growth > 0.0,
        };
        Ok((rows, summary))
    });
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for r in per_shape {
        let (r, s) = r?;
        rows.extend(r);
        summaries.push(s);
    }
    Ok(CharfunTable { rows, summaries })
}
