//! Smooth dyadic partition of unity on the frequency lattice and the
//! Littlewood-Paley operators built from it.
//!
//! The base symbol is `φ_0(ξ) = ρ(|ξ|)` (radial) or `ρ(|ξ_1|)ρ(|ξ_2|)`
//! (tensor), where `ρ` is the `exp(-1/t)` smoothstep that equals 1 on
//! `[0, 1]` and 0 on `[3/2, ∞)`. Level symbols are differences of dilates,
//! `φ_k(ξ) = φ_0(2^{-k}ξ) - φ_0(2^{1-k}ξ)`, so partial sums telescope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier, raw_spectrum, GridSpec, SampledFunction};

/// `g(t) = exp(-1/t)` for `t > 0`, else 0.
fn flat_exp(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth nonincreasing transition: 1 for `r ≤ 1`, 0 for `r ≥ 3/2`.
pub fn transition(r: f64) -> f64 {
    let a = flat_exp(3.0 - 2.0 * r);
    let b = flat_exp(2.0 * r - 2.0);
    a / (a + b)
}

/// Smoothstep on `[0, 1]`: 0 at 0, 1 at 1, `s(t) + s(1-t) = 1`.
pub fn smoothstep(t: f64) -> f64 {
    let a = flat_exp(t);
    let b = flat_exp(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PartitionKind {
    Radial,
    Tensor,
}

/// Symbols `φ_0, …, φ_{K_max}` sampled on the frequency lattice (FFT order).
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPartition {
    grid: GridSpec,
    kind: PartitionKind,
    symbols: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn build(grid: GridSpec, kind: PartitionKind) -> Self {
        let shape = Shape { kind, dim: grid.dim() };
        let symbols = crate::par::map_range(0, grid.k_max() + 1, |k| {
            (0..grid.len())
                .map(|i| {
                    let m = grid.frequency_vec(i);
                    shape.level(k, [m[0] as f64, m[1] as f64])
                })
                .collect()
        });
        DyadicPartition { grid, kind, symbols }
    }

    /// Rebuild from stored symbols, validating their shape.
    pub fn from_symbols(grid: GridSpec, kind: PartitionKind, symbols: Vec<Vec<f64>>) -> Result<Self> {
        if symbols.len() != grid.k_max() + 1 || symbols.iter().any(|s| s.len() != grid.len()) {
            return Err(Error::Format("symbol arrays do not match the grid".into()));
        }
        Ok(DyadicPartition { grid, kind, symbols })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn k_max(&self) -> usize {
        self.symbols.len() - 1
    }

    pub fn symbol(&self, k: usize) -> &[f64] {
        &self.symbols[k]
    }

    pub fn symbols(&self) -> &[Vec<f64>] {
        &self.symbols
    }

    /// `φ_0` at an arbitrary real frequency.
    pub fn base_at(&self, xi: [f64; 2]) -> f64 {
        Shape { kind: self.kind, dim: self.grid.dim() }.base(xi)
    }

    /// `φ_k` at an arbitrary real frequency (any `k ≥ 0`).
    pub fn level_at(&self, k: usize, xi: [f64; 2]) -> f64 {
        Shape { kind: self.kind, dim: self.grid.dim() }.level(k, xi)
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k > self.k_max() {
            Err(Error::LevelOutOfRange { level: k, max: self.k_max() })
        } else {
            Ok(())
        }
    }

    fn check_grid(&self, f: &SampledFunction) -> Result<()> {
        if f.grid() != self.grid {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy)]
struct Shape {
    kind: PartitionKind,
    dim: usize,
}

impl Shape {
    fn base(&self, xi: [f64; 2]) -> f64 {
        match (self.kind, self.dim) {
            (_, 1) => transition(xi[0].abs()),
            (PartitionKind::Radial, _) => transition(xi[0].hypot(xi[1])),
            (PartitionKind::Tensor, _) => transition(xi[0].abs()) * transition(xi[1].abs()),
        }
    }

    fn level(&self, k: usize, xi: [f64; 2]) -> f64 {
        let at = |s: i32| {
            let c = (s as f64).exp2();
            self.base([xi[0] * c, xi[1] * c])
        };
        if k == 0 {
            at(0)
        } else {
            at(-(k as i32)) - at(1 - k as i32)
        }
    }
}

/// Pieces `S_0 f, …, S_{K_max} f`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pieces: Vec<SampledFunction>,
    high_band_fraction: f64,
}

impl SpectralDecomposition {
    pub fn new(f: &SampledFunction, partition: &DyadicPartition) -> Result<Self> {
        partition.check_grid(f)?;
        let spectrum = raw_spectrum(f);
        let pieces = crate::par::map_range(0, partition.k_max() + 1, |k| {
            apply_multiplier(f, &spectrum, partition.symbol(k))
        });
        let grid = f.grid();
        let cut = (1u64 << (partition.k_max() - 1)) as f64;
        let (mut high, mut total) = (0.0, 0.0);
        for (i, c) in spectrum.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if grid.frequency_norm(i) > cut {
                high += e;
            }
        }
        let high_band_fraction = if total > 0.0 { high / total } else { 0.0 };
        Ok(SpectralDecomposition { pieces, high_band_fraction })
    }

    pub fn pieces(&self) -> &[SampledFunction] {
        &self.pieces
    }

    pub fn piece(&self, k: usize) -> &SampledFunction {
        &self.pieces[k]
    }

    pub fn k_max(&self) -> usize {
        self.pieces.len() - 1
    }

    /// Fraction of spectral energy above `2^{K_max-1}`.
    pub fn high_band_fraction(&self) -> f64 {
        self.high_band_fraction
    }

    /// `Σ_k S_k f`.
    pub fn reassemble(&self) -> SampledFunction {
        let grid = self.pieces[0].grid();
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        for p in &self.pieces {
            for (a, v) in acc.iter_mut().zip(p.values()) {
                *a += v;
            }
        }
        SampledFunction::new(grid, acc).expect("same grid")
    }
}

/// `S_k f = F^{-1}(φ_k F f)`.
pub fn project(f: &SampledFunction, partition: &DyadicPartition, k: usize) -> Result<SampledFunction> {
    partition.check_grid(f)?;
    partition.check_level(k)?;
    Ok(apply_multiplier(f, &raw_spectrum(f), partition.symbol(k)))
}

/// `S^k f = Σ_{j ≤ k} S_j f`.
pub fn partial_sum(f: &SampledFunction, partition: &DyadicPartition, k: usize) -> Result<SampledFunction> {
    partition.check_grid(f)?;
    partition.check_level(k)?;
    let mut symbol = vec![0.0; f.grid().len()];
    for j in 0..=k {
        for (s, v) in symbol.iter_mut().zip(partition.symbol(j)) {
            *s += v;
        }
    }
    Ok(apply_multiplier(f, &raw_spectrum(f), &symbol))
}

/// Spatial extent searched by [`peetre_maximal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeetreWindow {
    /// Every grid offset.
    #[default]
    Full,
    /// Offsets with every coordinate within this many cells.
    Cells(usize),
}

/// Peetre maximal function `S*_j f(x) = max_y |S_j f(x-y)| / (1 + 2^j|y|)^a`,
/// with `|y|` the torus distance.
pub fn peetre_maximal(
    f: &SampledFunction,
    partition: &DyadicPartition,
    j: usize,
    a: f64,
    window: PeetreWindow,
) -> Result<SampledFunction> {
    if !(a > 0.0) {
        return Err(Error::Parameter(format!("decay exponent must be positive, got {a}")));
    }
    let piece = project(f, partition, j)?;
    Ok(peetre_of_piece(&piece, j, a, window))
}

pub(crate) fn peetre_of_piece(piece: &SampledFunction, j: usize, a: f64, window: PeetreWindow) -> SampledFunction {
    let grid = piece.grid();
    let n = grid.n() as i64;
    let h = grid.spacing();
    let scale = (j as f64).exp2();
    let reach = match window {
        PeetreWindow::Full => n / 2,
        PeetreWindow::Cells(c) => (c as i64).min(n / 2),
    };
    let offsets: Vec<i64> = (-reach..reach.min(n / 2 - 1) + 1).collect();
    let moduli = piece.abs();
    let weight = |da: i64, db: i64| {
        let dist = h * ((da * da + db * db) as f64).sqrt();
        (1.0 + scale * dist).powf(-a)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    if grid.dim() == 1 {
        let w: Vec<f64> = offsets.iter().map(|&s| weight(s, 0)).collect();
        crate::par::fill_indexed(&mut out, |i| {
            let mut m = 0.0f64;
            for (&s, &ws) in offsets.iter().zip(&w) {
                let src = (i as i64 - s).rem_euclid(n) as usize;
                m = m.max(moduli[src] * ws);
            }
            Complex64::new(m, 0.0)
        });
    } else {
        let nu = n as usize;
        crate::par::fill_indexed(&mut out, |idx| {
            let (ia, ib) = ((idx / nu) as i64, (idx % nu) as i64);
            let mut m = 0.0f64;
            for &sa in &offsets {
                let ra = (ia - sa).rem_euclid(n) as usize;
                for &sb in &offsets {
                    let rb = (ib - sb).rem_euclid(n) as usize;
                    m = m.max(moduli[ra * nu + rb] * weight(sa, sb));
                }
            }
            Complex64::new(m, 0.0)
        });
    }
    SampledFunction::new(grid, out).expect("same grid")
}

/// Share of the spectral energy of `f` lying outside `lo ≤ |ξ| ≤ hi`.
pub fn energy_outside(f: &SampledFunction, lo: f64, hi: f64) -> f64 {
    let grid = f.grid();
    let spec = raw_spectrum(f);
    let (mut out, mut total) = (0.0, 0.0);
    for (i, c) in spec.iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        let r = grid.frequency_norm(i);
        if r < lo || r > hi {
            out += e;
        }
    }
    if total > 0.0 {
        out / total
    } else {
        0.0
    }
}

/// Exactness diagnostics of a stored partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    /// `max_{K, ξ} |Σ_{k≤K} φ_k(ξ) - φ_0(2^{-K}ξ)|` over the lattice.
    pub telescoping_error: f64,
    /// Largest share of `Σ φ_k^2` lying outside the `k`-th annulus
    /// (`|ξ| ≤ 3/2` for `k = 0`), with `|·|_∞` for the tensor kind.
    pub leakage: f64,
}

impl PartitionCheck {
    pub fn passes(&self) -> bool {
        self.telescoping_error <= 1e-12 && self.leakage < 1e-10
    }
}

pub fn check_partition(partition: &DyadicPartition) -> PartitionCheck {
    let grid = partition.grid();
    let kind = partition.kind();
    let radius = |i: usize| {
        let m = grid.frequency_vec(i);
        match kind {
            PartitionKind::Tensor if grid.dim() == 2 => m[0].abs().max(m[1].abs()) as f64,
            _ => grid.frequency_norm(i),
        }
    };
    let telescoping_error = crate::par::max_range(0, grid.len(), |i| {
        let m = grid.frequency_vec(i);
        let xi = [m[0] as f64, m[1] as f64];
        let mut acc = 0.0;
        let mut worst = 0.0f64;
        for k in 0..=partition.k_max() {
            acc += partition.symbol(k)[i];
            let c = (-(k as f64)).exp2();
            worst = worst.max((acc - partition.base_at([xi[0] * c, xi[1] * c])).abs());
        }
        worst
    });
    let leakage = crate::par::max_range(0, partition.k_max() + 1, |k| {
        let (lo, hi) = if k == 0 { (0.0, 1.5) } else { ((k as f64 - 1.0).exp2(), 3.0 * (k as f64 - 1.0).exp2()) };
        let (mut out, mut total) = (0.0, 0.0);
        for (i, &v) in partition.symbol(k).iter().enumerate() {
            let e = v * v;
            total += e;
            let r = radius(i);
            if r < lo || r > hi {
                out += e;
            }
        }
        if total > 0.0 {
            out / total
        } else {
            0.0
        }
    });
    PartitionCheck { telescoping_error, leakage }
}
