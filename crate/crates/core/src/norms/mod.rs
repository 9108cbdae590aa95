//! Logarithmic Besov and Triebel-Lizorkin norms, weighted sequence norms,
//! moduli of smoothness and the norms built from them.
//!
//! Every norm comes back as a [`NormReport`]: the truncated value together
//! with its per-level terms and an estimate of what the truncation dropped.

mod smoothness;

pub use smoothness::{
    diffspace_norm, dini_norm, log_sum_bounds, modulus, DiffParams, LogSum, LogSumBounds,
};

use serde::{Deserialize, Serialize};

use crate::cubes::CubeMeans;
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{lp_norm, SampledFunction};
use crate::partition::{DyadicPartition, SpectralDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub b: f64,
    pub p: LpExponent,
    pub q: LpExponent,
}

impl BesovParams {
    pub fn new(s: f64, b: f64, p: LpExponent, q: LpExponent) -> Self {
        BesovParams { s, b, p, q }
    }

    /// `B^{0,b}_{∞,∞}`.
    pub fn zero_inf(b: f64) -> Self {
        BesovParams::new(0.0, b, LpExponent::Inf, LpExponent::Inf)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    /// Weighted terms before the `ℓ^q` aggregation, indexed by level.
    pub per_level: Vec<f64>,
    /// Estimated contribution of the levels beyond the cutoff, from the
    /// geometric trend of the last three terms; `INF` when they do not decay.
    pub tail: f64,
    /// Share of spectral energy above `2^{K_max-1}` (0 for difference norms).
    pub band_fraction: f64,
}

impl NormReport {
    /// The dropped tail is not negligible next to the value.
    pub fn truncation_suspect(&self) -> bool {
        !(self.tail <= 0.05 * self.value)
    }
}

/// `2^{ks}(1+k)^b`.
pub fn level_weight(k: usize, s: f64, b: f64) -> f64 {
    (k as f64 * s).exp2() * (1.0 + k as f64).powf(b)
}

/// `(Σ t_k^q)^{1/q}`, or `max t_k` for `q = INF`. Nonnegative terms.
pub fn lq_aggregate(terms: &[f64], q: LpExponent) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, &t| m.max(t));
    match q {
        LpExponent::Inf => scale,
        _ if scale == 0.0 || !scale.is_finite() => scale,
        LpExponent::Finite(q) => scale * terms.iter().map(|&t| (t / scale).powf(q)).sum::<f64>().powf(1.0 / q),
    }
}

/// Remainder estimate for a truncated `ℓ^q` aggregation, continuing the
/// last terms geometrically.
pub fn tail_estimate(terms: &[f64], q: LpExponent) -> f64 {
    let n = terms.len();
    if n < 3 {
        return 0.0;
    }
    let (first, last) = (terms[n - 3], terms[n - 1]);
    if last == 0.0 {
        return 0.0;
    }
    if first == 0.0 {
        return f64::INFINITY;
    }
    let ratio = (last / first).sqrt();
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    match q {
        LpExponent::Inf => last * ratio,
        LpExponent::Finite(q) => last * ratio / (1.0 - ratio.powf(q)).powf(1.0 / q),
    }
}

/// `‖{u_k}‖_{ℓ^q_{s,b}(L^p)} = (Σ_k [2^{ks}(1+k)^b ‖u_k‖_{L^p}]^q)^{1/q}`.
pub fn seq_norm(u: &[SampledFunction], s: f64, b: f64, p: LpExponent, q: LpExponent) -> Result<f64> {
    let norms = crate::par::map_slice(u, |v| lp_norm(v, p));
    let terms = norms
        .into_iter()
        .enumerate()
        .map(|(k, n)| n.map(|n| level_weight(k, s, b) * n))
        .collect::<Result<Vec<_>>>()?;
    Ok(lq_aggregate(&terms, q))
}

/// `‖f‖_{B^{s,b}_{p,q}}` truncated at `K_max`.
pub fn besov_norm(f: &SampledFunction, partition: &DyadicPartition, params: BesovParams) -> Result<NormReport> {
    let pieces = SpectralDecomposition::new(f, partition)?;
    besov_of_pieces(&pieces, params)
}

pub(crate) fn besov_of_pieces(pieces: &SpectralDecomposition, params: BesovParams) -> Result<NormReport> {
    let norms = crate::par::map_slice(pieces.pieces(), |v| lp_norm(v, params.p));
    let per_level = norms
        .into_iter()
        .enumerate()
        .map(|(k, n)| n.map(|n| level_weight(k, params.s, params.b) * n))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport {
        value: lq_aggregate(&per_level, params.q),
        tail: tail_estimate(&per_level, params.q),
        band_fraction: pieces.high_band_fraction(),
        per_level,
    })
}

/// `‖f‖_{F^{s,b}_{∞,q}} = sup_{k,ν} (⨍_{Q_{k,ν}} Σ_{j≥k} [2^{js}(1+j)^b |S_j f|]^q)^{1/q}`.
///
/// Cube levels stop at the grid's resolution limit; `per_level` holds the
/// supremum over cubes at each level `k`.
pub fn tl_norm_inf(
    f: &SampledFunction,
    partition: &DyadicPartition,
    s: f64,
    b: f64,
    q: LpExponent,
) -> Result<NormReport> {
    if let LpExponent::Finite(v) = q {
        if !(v > 0.0) {
            return Err(Error::Parameter(format!("q must be positive, got {v}")));
        }
    }
    let grid = f.grid();
    let pieces = SpectralDecomposition::new(f, partition)?;
    let top = partition.k_max();
    let levels = grid.cube_level_max().min(top);
    let weighted: Vec<Vec<f64>> = (0..=top)
        .map(|j| {
            let w = level_weight(j, s, b);
            pieces.piece(j).abs().into_iter().map(|v| w * v).collect()
        })
        .collect();
    // suffix[k](x) = Σ_{j≥k} g_j^q, or max_{j≥k} g_j for q = INF
    let mut suffix = vec![vec![0.0; grid.len()]; levels + 1];
    let mut acc = vec![0.0; grid.len()];
    for j in (0..=top).rev() {
        for (a, &v) in acc.iter_mut().zip(&weighted[j]) {
            *a = match q {
                LpExponent::Inf => f64::max(*a, v),
                LpExponent::Finite(q) => *a + v.powf(q),
            };
        }
        if j <= levels {
            suffix[j].clone_from(&acc);
        }
    }
    let per_level = crate::par::map_range(0, levels + 1, |k| {
        let means = match q {
            LpExponent::Inf => CubeMeans::new(grid, &suffix[k], LpExponent::Inf),
            LpExponent::Finite(_) => CubeMeans::new(grid, &suffix[k], LpExponent::ONE),
        };
        means.sup(k).map(|m| match q {
            LpExponent::Inf => m,
            LpExponent::Finite(q) => m.powf(1.0 / q),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(NormReport {
        value: per_level.iter().fold(0.0, |m: f64, &v| m.max(v)),
        tail: 0.0,
        band_fraction: pieces.high_band_fraction(),
        per_level,
    })
}
