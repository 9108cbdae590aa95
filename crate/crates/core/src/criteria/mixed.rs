use serde::{Deserialize, Serialize};

use super::{ratio_weight, Analysis};
use crate::cubes::{cubes_at_level, CubeMeans, DyadicCube};
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::SampledFunction;
use crate::partition::DyadicPartition;

/// How the cube sequence `{P_j}` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedStrategy {
    /// Each `P_j` maximizes its own weighted mean.
    Greedy,
    /// Exact maximization over all sequences, 1D and levels `l ≤ max_level ≤ 3`.
    Exhaustive { max_level: usize },
}

const EXHAUSTIVE_LEVELS: usize = 3;
const EXHAUSTIVE_TERMS: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedReport {
    pub value: f64,
    /// Value at each outer level `l`.
    pub per_level: Vec<f64>,
}

/// `sup_l sup_{P_j} ‖2^{ln/p} Σ_{j≥l} ((1+l)/(1+j))^b (⨍_{P_j}|S_j f|^{p'})^{1/p'} 1_{P_j}‖_{L^p}`
/// over dyadic cubes of edge `2^{-l}` lying inside the domain. Such cubes are
/// pairwise disjoint, so with `a_j` the weighted mean the inner norm is
/// `(Σ_C (Σ_{P_j = C} a_j)^p)^{1/p}`.
pub fn nece_mixed(
    f: &SampledFunction,
    partition: &DyadicPartition,
    p: LpExponent,
    b: f64,
    strategy: MixedStrategy,
) -> Result<MixedReport> {
    let grid = f.grid();
    let a = Analysis::new(f, partition)?;
    let mut top = a.cube_levels();
    if let MixedStrategy::Exhaustive { max_level } = strategy {
        if grid.dim() != 1 || max_level > EXHAUSTIVE_LEVELS {
            return Err(Error::Capability(format!(
                "exhaustive search runs in 1D for levels up to {EXHAUSTIVE_LEVELS}"
            )));
        }
        let terms = a.k_max() + 1;
        if terms > EXHAUSTIVE_TERMS {
            return Err(Error::Capability(format!("exhaustive search handles at most {EXHAUSTIVE_TERMS} levels")));
        }
        top = top.min(max_level);
    }
    let dual = p.conjugate();
    let means: Vec<CubeMeans> =
        crate::par::map_range(0, a.k_max() + 1, |k| CubeMeans::new(grid, &a.pieces().piece(k).abs(), dual));
    let per_level = (0..=top)
        .map(|l| {
            let cubes: Vec<DyadicCube> = cubes_at_level(grid, l)?.into_iter().filter(DyadicCube::is_interior).collect();
            // weights[j - l][c]
            let weights: Vec<Vec<f64>> = (l..=a.k_max())
                .map(|j| {
                    let w = ratio_weight(l, j, b);
                    cubes.iter().map(|q| w * means[j].mean(q)).collect()
                })
                .collect();
            let greedy = greedy_value(&weights, p);
            Ok(match strategy {
                MixedStrategy::Greedy => greedy,
                MixedStrategy::Exhaustive { .. } => exhaustive_value(&weights, p).max(greedy),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MixedReport { value: per_level.iter().fold(0.0, |m: f64, &v| m.max(v)), per_level })
}

fn pick(weights: &[f64]) -> usize {
    weights.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc }).0
}

fn aggregate(loads: &[f64], p: LpExponent) -> f64 {
    crate::norms::lq_aggregate(loads, p)
}

fn greedy_value(weights: &[Vec<f64>], p: LpExponent) -> f64 {
    let Some(first) = weights.first() else {
        return 0.0;
    };
    let mut loads = vec![0.0; first.len()];
    for row in weights {
        if row.is_empty() {
            continue;
        }
        let c = pick(row);
        loads[c] += row[c];
    }
    aggregate(&loads, p)
}

/// Best assignment of terms to cubes, by dynamic programming over subsets.
fn exhaustive_value(weights: &[Vec<f64>], p: LpExponent) -> f64 {
    let terms = weights.len();
    let ncubes = weights.first().map_or(0, Vec::len);
    if terms == 0 || ncubes == 0 {
        return 0.0;
    }
    let pv = match p {
        LpExponent::Inf => {
            return (0..ncubes).map(|c| weights.iter().map(|r| r[c]).sum::<f64>()).fold(0.0, f64::max);
        }
        LpExponent::Finite(v) => v,
    };
    let full = (1usize << terms) - 1;
    let mut best = vec![f64::NEG_INFINITY; full + 1];
    best[0] = 0.0;
    let mut load = vec![0.0; full + 1];
    for c in 0..ncubes {
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            load[mask] = load[mask & (mask - 1)] + weights[low][c];
        }
        let powered: Vec<f64> = load.iter().map(|v| v.powf(pv)).collect();
        let prev = best.clone();
        for mask in 1..=full {
            let mut sub = mask;
            let mut m = prev[mask];
            while sub > 0 {
                let rest = prev[mask ^ sub];
                if rest > f64::NEG_INFINITY {
                    m = m.max(rest + powered[sub]);
                }
                sub = (sub - 1) & mask;
            }
            best[mask] = m;
        }
    }
    best[full].max(0.0).powf(1.0 / pv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::nece_term2;
    use crate::gallery::{make_bump, make_exponential, BumpSpec};
    use crate::grid::GridSpec;
    use crate::partition::PartitionKind;

    #[test]
    fn dp_matches_enumeration() {
        let w = vec![vec![1.0, 0.5, 0.2], vec![0.1, 0.9, 0.8], vec![0.7, 0.7, 0.1]];
        let p = LpExponent::finite(3.0).unwrap();
        let mut brute = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut loads = [0.0; 3];
                    loads[a] += w[0][a];
                    loads[b] += w[1][b];
                    loads[c] += w[2][c];
                    brute = brute.max(aggregate(&loads, p));
                }
            }
        }
        assert!((exhaustive_value(&w, p) - brute).abs() < 1e-12);
        assert!(greedy_value(&w, p) <= brute + 1e-15);
    }

    #[test]
    fn endpoint_reductions() {
        let g = GridSpec::new(1, 9).unwrap();
        let part = DyadicPartition::build(g, PartitionKind::Radial);
        let f = make_exponential(g, [32, 0]).unwrap();
        for p in [LpExponent::ONE, LpExponent::Inf] {
            let n2 = nece_term2(&f, &part, p, 0.0).unwrap().value;
            for s in [MixedStrategy::Greedy, MixedStrategy::Exhaustive { max_level: 3 }] {
                let m = nece_mixed(&f, &part, p, 0.0, s).unwrap().value;
                assert!((m - n2).abs() < 1e-9, "{p} {s:?}: {m} vs {n2}");
            }
        }
        let h = make_bump(g, BumpSpec::on_cube(4, [0, 0])).unwrap();
        let n2 = nece_term2(&h, &part, LpExponent::Inf, 0.0).unwrap().value;
        let m = nece_mixed(&h, &part, LpExponent::Inf, 0.0, MixedStrategy::Greedy).unwrap().value;
        assert!(m <= n2 + 1e-12);
        let p = LpExponent::finite(3.0).unwrap();
        let gr = nece_mixed(&h, &part, p, 0.5, MixedStrategy::Greedy).unwrap();
        let ex = nece_mixed(&h, &part, p, 0.5, MixedStrategy::Exhaustive { max_level: 3 }).unwrap();
        for l in 0..=3 {
            assert!(gr.per_level[l] <= ex.per_level[l]);
        }
        assert!(matches!(
            nece_mixed(&h, &part, p, 0.5, MixedStrategy::Exhaustive { max_level: 4 }),
            Err(Error::Capability(_))
        ));
    }
}
