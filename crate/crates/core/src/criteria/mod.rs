//! Pointwise-multiplier functionals for `B^{0,b}_{p,∞}`.
//!
//! Sufficiency functionals put the supremum over cubes inside the level sum;
//! necessity functionals put it outside. Both are evaluated from the same
//! table of cube means, so `necessity ≤ sufficiency` holds term by term in
//! floating point, not only in exact arithmetic.
//!
//! Cube levels stop at [`GridSpec::cube_level_max`](crate::GridSpec::cube_level_max);
//! level sums stop at `K_max` and carry a tail estimate.

mod mixed;

pub use mixed::{nece_mixed, MixedReport, MixedStrategy};

use serde::{Deserialize, Serialize};

use crate::cubes::CubeMeans;
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{lp_norm, SampledFunction};
use crate::norms::tail_estimate;
use crate::partition::{DyadicPartition, SpectralDecomposition};

/// A level series whose inner tail counts as divergent once it exceeds this
/// share of the retained value.
const DIVERGENT_TAIL: f64 = 0.5;
/// A supremum over `k` counts as unbounded when its last three terms still
/// grow by this factor.
const GROWTH_FACTOR: f64 = 1.1;

/// Series terms below this share of the value are FFT round-off.
const ROUNDOFF: f64 = 1e-12;

/// One criterion functional with its breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub value: f64,
    /// Value per outer index (`l` for second terms, `k` for third terms).
    pub per_level: Vec<f64>,
    /// Truncation tail of the dominant level series.
    pub tail: f64,
    /// The level data suggest the untruncated functional is infinite.
    pub divergent: bool,
}

impl Functional {
    fn from_sup_over_sums(per_level: Vec<f64>, series: &[Vec<f64>]) -> Self {
        let best = argmax(&per_level);
        let (tail, value) = match best {
            Some(i) => {
                let floor = ROUNDOFF * per_level[i];
                let clean: Vec<f64> = series[i].iter().map(|&v| if v <= floor { 0.0 } else { v }).collect();
                (tail_estimate(&clean, LpExponent::ONE), per_level[i])
            }
            None => (0.0, 0.0),
        };
        Functional { value, divergent: !(tail <= DIVERGENT_TAIL * value), tail, per_level }
    }

    fn from_sup(per_level: Vec<f64>) -> Self {
        let value = per_level.iter().fold(0.0f64, |m, &v| m.max(v));
        let n = per_level.len();
        let growing = n >= 3 && {
            let (a, z) = (per_level[n - 3], per_level[n - 1]);
            z > 0.0 && z >= value && z > GROWTH_FACTOR * a
        };
        let tail = if growing { f64::INFINITY } else { 0.0 };
        Functional { value, per_level, tail, divergent: growing || !value.is_finite() }
    }
}

fn argmax(v: &[f64]) -> Option<usize> {
    v.iter().enumerate().fold(None, |acc, (i, &x)| match acc {
        Some((_, m)) if m >= x => acc,
        _ => Some((i, x)),
    })
    .map(|(i, _)| i)
}

/// `((1+num)/(1+den))^b`.
fn ratio_weight(num: usize, den: usize, b: f64) -> f64 {
    ((1.0 + num as f64) / (1.0 + den as f64)).powf(b)
}

/// Weight `w(k)` of the closed-form third term for `p = ∞`.
pub fn pinf_weight(k: usize, b: f64) -> f64 {
    let x = 1.0 + k as f64;
    if b > 1.0 {
        x.powf(b)
    } else if b == 1.0 {
        x * x.ln()
    } else {
        x
    }
}

/// Littlewood-Paley pieces of one function, shared by all functionals.
#[derive(Debug, Clone)]
pub struct Analysis {
    pieces: SpectralDecomposition,
    sup_norms: Vec<f64>,
    linf: f64,
}

/// Per-cube means `[k][l][cube]` for `l ≤ min(l_max, K_max)`.
type MeanTable = Vec<Vec<Vec<f64>>>;

impl Analysis {
    pub fn new(f: &SampledFunction, partition: &DyadicPartition) -> Result<Self> {
        let pieces = SpectralDecomposition::new(f, partition)?;
        let sup_norms = pieces.pieces().iter().map(SampledFunction::max_abs).collect();
        Ok(Analysis { linf: lp_norm(f, LpExponent::Inf)?, pieces, sup_norms })
    }

    pub fn pieces(&self) -> &SpectralDecomposition {
        &self.pieces
    }

    pub fn linf(&self) -> f64 {
        self.linf
    }

    /// `‖S_k f‖_∞` for every `k`.
    pub fn sup_norms(&self) -> &[f64] {
        &self.sup_norms
    }

    fn k_max(&self) -> usize {
        self.pieces.k_max()
    }

    fn grid(&self) -> crate::grid::GridSpec {
        self.pieces.piece(0).grid()
    }

    fn cube_levels(&self) -> usize {
        self.grid().cube_level_max().min(self.k_max())
    }

    /// Raw means `⨍_Q |S_k f|^r` (maxima for `r = ∞`).
    fn mean_table(&self, r: LpExponent) -> Result<MeanTable> {
        let levels = self.cube_levels();
        let grid = self.grid();
        crate::par::map_range(0, self.k_max() + 1, |k| {
            let means = CubeMeans::new(grid, &self.pieces.piece(k).abs(), r);
            (0..=levels)
                .map(|l| {
                    let cubes = crate::cubes::cubes_at_level(grid, l)?;
                    Ok(cubes.iter().map(|q| means.raw_mean(q)).collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()
        })
        .into_iter()
        .collect()
    }

    /// Sufficiency and necessity second terms, `(suff, nece)`.
    pub fn term2_pair(&self, p: LpExponent, b: f64) -> Result<(Functional, Functional)> {
        let dual = p.conjugate();
        let kmax = self.k_max();
        if dual.is_inf() {
            let series: Vec<Vec<f64>> = (0..=kmax)
                .map(|l| (l..=kmax).map(|k| ratio_weight(l, k, b) * self.sup_norms[k]).collect())
                .collect();
            let per_level = series.iter().map(|s| s.iter().sum()).collect();
            let f = Functional::from_sup_over_sums(per_level, &series);
            return Ok((f.clone(), f));
        }
        let root = 1.0 / dual.value();
        let table = self.mean_table(dual)?;
        let mut suff_series = Vec::new();
        let mut nece_series = Vec::new();
        for l in 0..=self.cube_levels() {
            let ncubes = table[0][l].len();
            let mut best_cube = vec![0.0; ncubes];
            let mut suff = Vec::with_capacity(kmax + 1 - l);
            let mut cube_terms = vec![Vec::with_capacity(kmax + 1 - l); ncubes];
            for (k, per_k) in table.iter().enumerate().skip(l) {
                let w = ratio_weight(l, k, b);
                let row: Vec<f64> = per_k[l].iter().map(|&m| w * m.max(0.0).powf(root)).collect();
                suff.push(row.iter().fold(0.0f64, |a, &v| a.max(v)));
                for (q, &v) in row.iter().enumerate() {
                    best_cube[q] += v;
                    cube_terms[q].push(v);
                }
            }
            let q = argmax(&best_cube).unwrap_or(0);
            suff_series.push(suff);
            nece_series.push(std::mem::take(&mut cube_terms[q]));
        }
        let sum = |s: &Vec<f64>| s.iter().sum::<f64>();
        let suff_levels: Vec<f64> = suff_series.iter().map(sum).collect();
        let nece_levels: Vec<f64> = nece_series.iter().map(sum).collect();
        Ok((
            Functional::from_sup_over_sums(suff_levels, &suff_series),
            Functional::from_sup_over_sums(nece_levels, &nece_series),
        ))
    }

    /// Sufficiency and necessity third terms, `(suff, nece)`. For `p = ∞`
    /// the sufficiency term is the closed form [`Analysis::pinf_term3`].
    pub fn term3_pair(&self, p: LpExponent, b: f64) -> Result<(Functional, Functional)> {
        let kmax = self.k_max();
        if p.is_inf() {
            let nece = (0..=kmax)
                .map(|k| {
                    if k < 2 {
                        0.0
                    } else {
                        (0..=k - 2).map(|l| ratio_weight(k, l, b)).sum::<f64>() * self.sup_norms[k]
                    }
                })
                .collect();
            return Ok((self.pinf_term3(b), Functional::from_sup(nece)));
        }
        let pv = p.value();
        let table = self.mean_table(p)?;
        let levels = self.cube_levels();
        let mut suff = vec![0.0; kmax + 1];
        let mut nece = vec![0.0; kmax + 1];
        for k in 2..=kmax {
            let t: Vec<f64> = (0..=(k - 2).min(levels))
                .map(|j| {
                    let m = table[k][j].iter().fold(0.0f64, |a, &v| a.max(v));
                    ratio_weight(k, j, b) * m.powf(1.0 / pv)
                })
                .collect();
            let s: f64 = t.iter().sum();
            let top = t.iter().fold(0.0f64, |a, &v| a.max(v));
            let n = if pv == 1.0 || top == 0.0 {
                if pv == 1.0 { s } else { 0.0 }
            } else {
                top * t.iter().map(|&v| (v / top).powf(pv)).sum::<f64>().powf(1.0 / pv)
            };
            suff[k] = s;
            // ℓ^p ≤ ℓ^1; clamp rounding noise only
            nece[k] = if n > s && n - s <= 1e-14 * s { s } else { n };
        }
        Ok((Functional::from_sup(suff), Functional::from_sup(nece)))
    }

    /// `sup_l (1+l)^b sup_{l(P)=2^{-l}} ⨍_P Σ_{k≥l} (1+k)^{-b}|S_k f|`.
    pub fn pinf_term2(&self, b: f64) -> Result<Functional> {
        let grid = self.grid();
        let kmax = self.k_max();
        let levels = self.cube_levels();
        let moduli: Vec<Vec<f64>> = self.pieces.pieces().iter().map(SampledFunction::abs).collect();
        let mut acc = vec![0.0; grid.len()];
        let mut fields = vec![Vec::new(); levels + 1];
        for k in (0..=kmax).rev() {
            let w = (1.0 + k as f64).powf(-b);
            for (a, &v) in acc.iter_mut().zip(&moduli[k]) {
                *a += w * v;
            }
            if k <= levels {
                fields[k].clone_from(&acc);
            }
        }
        let per_level = crate::par::map_range(0, levels + 1, |l| {
            let means = CubeMeans::new(grid, &fields[l], LpExponent::ONE);
            means.sup(l).map(|m| (1.0 + l as f64).powf(b) * m)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        // inner series for the tail: per-k cube suprema at the dominant level
        let series: Vec<Vec<f64>> = (0..=levels)
            .map(|l| (l..=kmax).map(|k| ratio_weight(l, k, b) * self.sup_norms[k]).collect())
            .collect();
        let mut f = Functional::from_sup_over_sums(per_level, &series);
        if let Some(i) = argmax(&f.per_level) {
            let bound: f64 = series[i].iter().sum();
            f.divergent = !(f.tail <= DIVERGENT_TAIL * bound);
        }
        Ok(f)
    }

    /// `sup_{k≥2} w(k)‖S_k f‖_∞` with `w(k) = (1+k)^b`, `(1+k)ln(1+k)` or
    /// `(1+k)` for `b > 1`, `b = 1`, `b < 1`.
    pub fn pinf_term3(&self, b: f64) -> Functional {
        let per_level = self
            .sup_norms
            .iter()
            .enumerate()
            .map(|(k, &v)| if k < 2 { 0.0 } else { pinf_weight(k, b) * v })
            .collect();
        Functional::from_sup(per_level)
    }
}

fn check_p_finite(p: LpExponent) -> Result<()> {
    if p.is_inf() {
        return Err(Error::Parameter("this functional needs a finite p".into()));
    }
    Ok(())
}

/// `sup_l Σ_{k≥l} ((1+l)/(1+k))^b sup_{l(P)=2^{-l}} (⨍_P |S_k f|^{p'})^{1/p'}`.
pub fn suff_term2(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<Functional> {
    check_p_finite(p)?;
    Ok(Analysis::new(f, partition)?.term2_pair(p, b)?.0)
}

/// `sup_{k≥2} Σ_{j≤k-2} ((1+k)/(1+j))^b sup_{l(P)=2^{-j}} (⨍_P |S_k f|^p)^{1/p}`.
pub fn suff_term3(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<Functional> {
    Ok(Analysis::new(f, partition)?.term3_pair(p, b)?.0)
}

pub fn pinf_term2(f: &SampledFunction, partition: &DyadicPartition, b: f64) -> Result<Functional> {
    Analysis::new(f, partition)?.pinf_term2(b)
}

pub fn pinf_term3(f: &SampledFunction, partition: &DyadicPartition, b: f64) -> Result<Functional> {
    Ok(Analysis::new(f, partition)?.pinf_term3(b))
}

/// `sup_l sup_{l(Q)=2^{-l}} Σ_{k≥l} ((1+l)/(1+k))^b (⨍_Q |S_k f|^{p'})^{1/p'}`.
pub fn nece_term2(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<Functional> {
    Ok(Analysis::new(f, partition)?.term2_pair(p, b)?.1)
}

/// `sup_{k≥2} (Σ_{j≤k-2} ((1+k)/(1+j))^{bp} sup_{l(P)=2^{-j}} ⨍_P |S_k f|^p)^{1/p}`;
/// for `p = ∞`, `sup_k Σ_{l≤k-2} ((1+k)/(1+l))^b ‖S_k f‖_∞`.
pub fn nece_term3(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<Functional> {
    Ok(Analysis::new(f, partition)?.term3_pair(p, b)?.1)
}

/// Netrusov-type functional `sup_i 2^{is} Σ_{l≤i} 2^{-ls} sup_Q ⨍_Q |S_i f|`
/// with `Q` ranging over cubes of side `2^{1-l}` (side 1 at `l = 0`).
pub fn netrusov(f: &SampledFunction, partition: &DyadicPartition, s: f64) -> Result<Functional> {
    let dim = f.grid().dim() as f64;
    if !(s > 0.0 && s < dim) {
        return Err(Error::Parameter(format!("s must lie in (0, {dim}), got {s}")));
    }
    let a = Analysis::new(f, partition)?;
    let table = a.mean_table(LpExponent::ONE)?;
    let levels = a.cube_levels();
    let per_level = (0..=a.k_max())
        .map(|i| {
            let top = i.min(levels + 1);
            (0..=top)
                .map(|l| {
                    let cube_level = l.saturating_sub(1);
                    let m = table[i][cube_level].iter().fold(0.0f64, |x, &v| x.max(v));
                    ((i as f64 - l as f64) * s).exp2() * m
                })
                .sum()
        })
        .collect();
    Ok(Functional::from_sup(per_level))
}

/// `sup_j (1+j)^α [ln(1+j)]^β ‖S_j f‖_∞` with `α = max(b, 1/2)`, `β = 1/2`
/// iff `b = 1/2` for `p ≥ 2`, and `α = max(b, 1/p)`, `β = 1/p` iff `b = 1/p`
/// for `p < 2`.
pub fn pi3_log_bound(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<Functional> {
    let pv = match p {
        LpExponent::Finite(v) if v > 1.0 => v,
        _ => return Err(Error::Capability("use the p = 1 or p = inf functionals instead".into())),
    };
    let pivot = if pv >= 2.0 { 0.5 } else { 1.0 / pv };
    let alpha = b.max(pivot);
    let beta = if b == pivot { pivot } else { 0.0 };
    let a = Analysis::new(f, partition)?;
    let per_level = a
        .sup_norms
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let x = 1.0 + j as f64;
            let log = if beta == 0.0 { 1.0 } else { x.ln().powf(beta) };
            x.powf(alpha) * log * v
        })
        .collect();
    Ok(Functional::from_sup(per_level))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Multiplier,
    NotMultiplier,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub p: LpExponent,
    pub b: f64,
    pub term_linf: f64,
    /// Sufficiency second and third terms (they characterize for `p ∈ {1, ∞}`).
    pub term2: Functional,
    pub term3: Functional,
    pub combined: f64,
    /// Necessity terms, reported for `1 < p < ∞`.
    pub nece_term2: Option<Functional>,
    pub nece_term3: Option<Functional>,
    /// `[necessity, sufficiency]` totals for `1 < p < ∞`.
    pub bracket: Option<[f64; 2]>,
    pub verdict: Verdict,
}

/// Bracket ends further apart than this factor count as disagreeing.
const MAGNITUDE_GAP: f64 = 10.0;

/// Evaluate the criterion for `B^{0,b}_{p,∞}`. For `p ∈ {1, ∞}` the
/// functionals characterize multipliers and the verdict follows the
/// divergence diagnostics; for `1 < p < ∞` the verdict is undecided unless
/// the two bounds agree in magnitude.
pub fn verdict(f: &SampledFunction, partition: &DyadicPartition, p: LpExponent, b: f64) -> Result<CriterionReport> {
    let a = Analysis::new(f, partition)?;
    let linf = a.linf();
    let (term2, term3, nece) = match p {
        LpExponent::Inf => (a.pinf_term2(b)?, a.pinf_term3(b), None),
        LpExponent::Finite(v) if v == 1.0 => (a.term2_pair(p, b)?.0, a.term3_pair(p, b)?.0, None),
        LpExponent::Finite(_) => {
            let (s2, n2) = a.term2_pair(p, b)?;
            let (s3, n3) = a.term3_pair(p, b)?;
            (s2, s3, Some((n2, n3)))
        }
    };
    let combined = linf + term2.value + term3.value;
    let suff_ok = !term2.divergent && !term3.divergent && combined.is_finite();
    let (verdict, bracket, nece_term2, nece_term3) = match nece {
        None => (if suff_ok { Verdict::Multiplier } else { Verdict::NotMultiplier }, None, None, None),
        Some((n2, n3)) => {
            let lower = linf + n2.value + n3.value;
            let v = if combined > MAGNITUDE_GAP * lower {
                Verdict::Undecided
            } else if suff_ok {
                Verdict::Multiplier
            } else if n2.divergent || n3.divergent {
                Verdict::NotMultiplier
            } else {
                Verdict::Undecided
            };
            (v, Some([lower, combined]), Some(n2), Some(n3))
        }
    };
    Ok(CriterionReport { p, b, term_linf: linf, term2, term3, combined, nece_term2, nece_term3, bracket, verdict })
}
