//! Paraproduct splitting of pointwise products and lower bounds for
//! multiplier norms from test families.
//!
//! Products are formed pointwise on the grid, so frequencies above `N/2`
//! alias. Inputs band-limited below `2^{K_max-3}` avoid this.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, SampledFunction};
use crate::exponent::LpExponent;
use crate::norms::{besov_norm, BesovParams};
use crate::partition::{partial_sum, DyadicPartition, SpectralDecomposition};

/// Which of the three paraproducts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Paraproduct {
    /// `Π_1 = Σ_{k≥2} (S^{k-2} f) S_k g`: low frequencies of `f` against `g`.
    Low,
    /// `Π_2 = Σ_k Σ_{|i|≤1} (S_{k+i} f) S_k g`: comparable frequencies.
    Diagonal,
    /// `Π_3 = Σ_{k≥2} (S_k f) S^{k-2} g`: high frequencies of `f`.
    High,
}

impl Paraproduct {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Paraproduct::Low),
            2 => Ok(Paraproduct::Diagonal),
            3 => Ok(Paraproduct::High),
            _ => Err(Error::Parameter(format!("paraproduct index must be 1, 2 or 3, got {i}"))),
        }
    }
}

fn pieces_pair(
    f: &SampledFunction,
    g: &SampledFunction,
    partition: &DyadicPartition,
) -> Result<(SpectralDecomposition, SpectralDecomposition)> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    Ok((SpectralDecomposition::new(f, partition)?, SpectralDecomposition::new(g, partition)?))
}

fn accumulate(acc: &mut [Complex64], a: &SampledFunction, b: &SampledFunction) {
    for ((s, x), y) in acc.iter_mut().zip(a.values()).zip(b.values()) {
        *s += x * y;
    }
}

/// `Σ_k (S^{k-2} u) S_k v`, the shape shared by `Π_1` and `Π_3`.
fn low_high(u: &SpectralDecomposition, v: &SpectralDecomposition) -> SampledFunction {
    let grid = u.piece(0).grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut low = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 2..=u.k_max() {
        for (l, x) in low.iter_mut().zip(u.piece(k - 2).values()) {
            *l += x;
        }
        let lowf = SampledFunction::new(grid, low.clone()).expect("same grid");
        accumulate(&mut acc, &lowf, v.piece(k));
    }
    SampledFunction::new(grid, acc).expect("same grid")
}

/// `k`-th summand `Σ_{|i|≤1} (S_{k+i} f) S_k g` of `Π_2`.
fn diagonal_summand(fp: &SpectralDecomposition, gp: &SpectralDecomposition, k: usize) -> SampledFunction {
    let grid = fp.piece(0).grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in k.saturating_sub(1)..=(k + 1).min(fp.k_max()) {
        accumulate(&mut acc, fp.piece(j), gp.piece(k));
    }
    SampledFunction::new(grid, acc).expect("same grid")
}

pub fn paraproduct(
    f: &SampledFunction,
    g: &SampledFunction,
    partition: &DyadicPartition,
    which: Paraproduct,
) -> Result<SampledFunction> {
    let (fp, gp) = pieces_pair(f, g, partition)?;
    Ok(match which {
        Paraproduct::Low => low_high(&fp, &gp),
        Paraproduct::High => low_high(&gp, &fp),
        Paraproduct::Diagonal => {
            let grid = f.grid();
            let mut acc = SampledFunction::zeros(grid);
            for k in 0..=fp.k_max() {
                acc = acc.add(&diagonal_summand(&fp, &gp, k))?;
            }
            acc
        }
    })
}

/// The `k`-th summand of `Π_2`, exposed for support checks.
pub fn diagonal_term(
    f: &SampledFunction,
    g: &SampledFunction,
    partition: &DyadicPartition,
    k: usize,
) -> Result<SampledFunction> {
    let (fp, gp) = pieces_pair(f, g, partition)?;
    if k > fp.k_max() {
        return Err(Error::LevelOutOfRange { level: k, max: fp.k_max() });
    }
    Ok(diagonal_summand(&fp, &gp, k))
}

#[derive(Debug, Clone)]
pub struct ProductReport {
    pub pi1: SampledFunction,
    pub pi2: SampledFunction,
    pub pi3: SampledFunction,
    /// `‖Π_1 + Π_2 + Π_3 - fg‖_2 / ‖fg‖_2`.
    pub residual: f64,
}

pub fn paraproducts(f: &SampledFunction, g: &SampledFunction, partition: &DyadicPartition) -> Result<ProductReport> {
    let pi1 = paraproduct(f, g, partition, Paraproduct::Low)?;
    let pi2 = paraproduct(f, g, partition, Paraproduct::Diagonal)?;
    let pi3 = paraproduct(f, g, partition, Paraproduct::High)?;
    let product = f.mul(g)?;
    let diff = pi1.add(&pi2)?.add(&pi3)?.sub(&product)?;
    let scale = lp_norm(&product, LpExponent::TWO)?;
    let err = lp_norm(&diff, LpExponent::TWO)?;
    let residual = if scale > 0.0 { err / scale } else { err };
    Ok(ProductReport { pi1, pi2, pi3, residual })
}

#[derive(Debug, Clone)]
pub struct TruncatedProduct {
    /// `(S^J f)(S^J g)`.
    pub product: SampledFunction,
    /// `(J', ‖P_{J'} - P_{J'-1}‖_2)` for `J' = J, J-1, J-2` where defined.
    pub differences: Vec<(usize, f64)>,
}

pub fn truncated_product(
    f: &SampledFunction,
    g: &SampledFunction,
    partition: &DyadicPartition,
    level: usize,
) -> Result<TruncatedProduct> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    let at = |j: usize| -> Result<SampledFunction> { partial_sum(f, partition, j)?.mul(&partial_sum(g, partition, j)?) };
    let product = at(level)?;
    let lowest = level.saturating_sub(3);
    let mut products = vec![product.clone()];
    for j in (lowest..level).rev() {
        products.push(at(j)?);
    }
    let differences = products
        .windows(2)
        .enumerate()
        .map(|(i, w)| Ok((level - i, lp_norm(&w[0].sub(&w[1])?, LpExponent::TWO)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedProduct { product, differences })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `max_g ‖fg‖ / ‖g‖`.
    pub value: f64,
    /// Index of the maximizing family member.
    pub argmax: usize,
    pub ratios: Vec<f64>,
}

/// Test functions with their norms computed once, for bounding many
/// candidate multipliers against the same family.
#[derive(Debug, Clone)]
pub struct TestFamily<'a> {
    partition: &'a DyadicPartition,
    params: BesovParams,
    members: Vec<SampledFunction>,
    norms: Vec<f64>,
}

impl<'a> TestFamily<'a> {
    pub fn new(partition: &'a DyadicPartition, params: BesovParams, members: Vec<SampledFunction>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::RejectedInput("empty test family".into()));
        }
        let norms = crate::par::map_slice(&members, |g| besov_norm(g, partition, params).map(|r| r.value))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        if norms.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::RejectedInput("test function with zero norm".into()));
        }
        Ok(TestFamily { partition, params, members, norms })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max_g ‖f g‖_B / ‖g‖_B` over the family.
    pub fn bound(&self, f: &SampledFunction) -> Result<LowerBound> {
        let ratios = crate::par::map_range(0, self.members.len(), |i| -> Result<f64> {
            Ok(besov_norm(&f.mul(&self.members[i])?, self.partition, self.params)?.value / self.norms[i])
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let (argmax, value) =
            ratios.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &r)| if r > a.1 { (i, r) } else { a });
        Ok(LowerBound { value, argmax, ratios })
    }
}

/// `max_g ‖f g‖_B / ‖g‖_B` over the family; any family bounds `‖f‖_M` below.
pub fn multiplier_lower_bound(
    f: &SampledFunction,
    partition: &DyadicPartition,
    params: BesovParams,
    family: &[SampledFunction],
) -> Result<LowerBound> {
    TestFamily::new(partition, params, family.to_vec())?.bound(f)
}
