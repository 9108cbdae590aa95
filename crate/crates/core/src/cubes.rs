//! Dyadic cubes `Q_{l,ν} = 2^{-l}(ν + [0,1)^dim)` and power means over them.
//!
//! A level-`l` family consists of every dyadic cube meeting the fundamental
//! domain `[-π, π)^dim`; cubes straddling the boundary are read through the
//! periodic extension, so each sample belongs to at least one cube per level.
//! Sums use a periodic summed-area table, giving O(1) work per cube.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{GridSpec, SampledFunction};

/// Grid-aligned dyadic cube with edge `2^{-level}` and corner `2^{-level}·ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    level: usize,
    corner: [i64; 2],
}

impl DyadicCube {
    /// Validate against the grid: the cube must meet the domain and its edge
    /// must span at least eight samples.
    pub fn new(grid: GridSpec, level: usize, corner: [i64; 2]) -> Result<Self> {
        let max = grid.cube_level_max();
        if level > max {
            return Err(Error::Resolution { level, max });
        }
        let (lo, hi) = corner_range(level);
        if corner[..grid.dim()].iter().any(|&c| c < lo || c > hi) {
            return Err(Error::Domain);
        }
        let corner = if grid.dim() == 1 { [corner[0], 0] } else { corner };
        Ok(DyadicCube { level, corner })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn corner_index(&self) -> [i64; 2] {
        self.corner
    }

    pub fn edge(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Lower-left corner `x_Q`.
    pub fn corner(&self) -> [f64; 2] {
        let e = self.edge();
        [self.corner[0] as f64 * e, self.corner[1] as f64 * e]
    }

    /// Whether the cube lies inside `[-π, π)^n` without wrapping.
    pub fn is_interior(&self) -> bool {
        let e = self.edge();
        self.corner().iter().all(|&c| c >= -PI && c + e <= PI)
    }

    /// Flat indices of the samples inside the cube, wrapped periodically.
    pub fn samples(&self, grid: GridSpec) -> Vec<usize> {
        let n = grid.n() as i64;
        let c = self.corner();
        let (a0, a1) = index_span(grid, c[0], self.edge());
        if grid.dim() == 1 {
            return (a0..a1).map(|a| a.rem_euclid(n) as usize).collect();
        }
        let (b0, b1) = index_span(grid, c[1], self.edge());
        let mut out = Vec::with_capacity(((a1 - a0) * (b1 - b0)) as usize);
        for a in a0..a1 {
            for b in b0..b1 {
                out.push((a.rem_euclid(n) * n + b.rem_euclid(n)) as usize);
            }
        }
        out
    }
}

/// Inclusive range of corner indices whose cubes meet `[-π, π)`.
fn corner_range(level: usize) -> (i64, i64) {
    let scale = (level as f64).exp2();
    ((-PI * scale).floor() as i64, (PI * scale).floor() as i64)
}

/// All cubes of level `l` meeting the domain.
pub fn cubes_at_level(grid: GridSpec, level: usize) -> Result<Vec<DyadicCube>> {
    let max = grid.cube_level_max();
    if level > max {
        return Err(Error::Resolution { level, max });
    }
    let (lo, hi) = corner_range(level);
    let mut out = Vec::new();
    if grid.dim() == 1 {
        out.extend((lo..=hi).map(|v| DyadicCube { level, corner: [v, 0] }));
    } else {
        for a in lo..=hi {
            out.extend((lo..=hi).map(|b| DyadicCube { level, corner: [a, b] }));
        }
    }
    Ok(out)
}

/// Half-open sample index range `[i0, i1)` covered by `[c, c + w)`; may run
/// outside `0..N` and is then read periodically.
fn index_span(grid: GridSpec, corner: f64, edge: f64) -> (i64, i64) {
    let h = grid.spacing();
    let i0 = ((corner + PI) / h).ceil() as i64;
    let i1 = ((corner + edge + PI) / h).ceil() as i64;
    (i0, i1)
}

/// Power means `(⨍_Q g^r)^{1/r}` of a fixed nonnegative field over dyadic cubes.
#[derive(Debug, Clone)]
pub struct CubeMeans {
    grid: GridSpec,
    exponent: LpExponent,
    field: Vec<f64>,
    table: Vec<f64>,
}

impl CubeMeans {
    /// `moduli` holds the nonnegative samples `|f|`.
    pub fn new(grid: GridSpec, moduli: &[f64], exponent: LpExponent) -> Self {
        let (field, table) = match exponent {
            LpExponent::Inf => (moduli.to_vec(), Vec::new()),
            LpExponent::Finite(r) => {
                let powered: Vec<f64> = moduli.iter().map(|&v| v.powf(r)).collect();
                let table = summed_area(grid, &powered);
                (powered, table)
            }
        };
        CubeMeans { grid, exponent, field, table }
    }

    pub fn exponent(&self) -> LpExponent {
        self.exponent
    }

    /// `(⨍_Q g^r)^{1/r}`, or the maximum over `Q` for `r = INF`.
    pub fn mean(&self, cube: &DyadicCube) -> f64 {
        let raw = self.raw_mean(cube);
        match self.exponent {
            LpExponent::Inf => raw,
            LpExponent::Finite(r) => raw.max(0.0).powf(1.0 / r),
        }
    }

    /// `⨍_Q g^r` without the final root (the maximum for `r = INF`).
    pub fn raw_mean(&self, cube: &DyadicCube) -> f64 {
        let e = cube.edge();
        let c = cube.corner();
        let (a0, a1) = index_span(self.grid, c[0], e);
        let (b0, b1) = if self.grid.dim() == 2 { index_span(self.grid, c[1], e) } else { (0, 1) };
        match self.exponent {
            LpExponent::Inf => self.range_max(a0, a1, b0, b1),
            LpExponent::Finite(_) => {
                let count = ((a1 - a0) * (b1 - b0)) as f64;
                self.range_sum(a0, a1, b0, b1) / count
            }
        }
    }

    /// Means over every cube of level `l`, in [`cubes_at_level`] order.
    pub fn level_means(&self, level: usize) -> Result<Vec<f64>> {
        let cubes = cubes_at_level(self.grid, level)?;
        Ok(crate::par::map_slice(&cubes, |q| self.mean(q)))
    }

    /// Largest mean over level `l`.
    pub fn sup(&self, level: usize) -> Result<f64> {
        Ok(self.level_means(level)?.into_iter().fold(0.0, f64::max))
    }

    fn range_max(&self, a0: i64, a1: i64, b0: i64, b1: i64) -> f64 {
        let n = self.grid.n() as i64;
        let mut m = 0.0f64;
        for a in a0..a1 {
            let ra = a.rem_euclid(n) as usize;
            if self.grid.dim() == 1 {
                m = m.max(self.field[ra]);
            } else {
                for b in b0..b1 {
                    m = m.max(self.field[ra * n as usize + b.rem_euclid(n) as usize]);
                }
            }
        }
        m
    }

    fn range_sum(&self, a0: i64, a1: i64, b0: i64, b1: i64) -> f64 {
        if self.grid.dim() == 1 {
            self.prefix1(a1) - self.prefix1(a0)
        } else {
            self.prefix2(a1, b1) - self.prefix2(a0, b1) - self.prefix2(a1, b0) + self.prefix2(a0, b0)
        }
    }

    fn prefix1(&self, i: i64) -> f64 {
        let n = self.grid.n() as i64;
        let (q, r) = (i.div_euclid(n), i.rem_euclid(n) as usize);
        q as f64 * self.table[n as usize] + self.table[r]
    }

    fn prefix2(&self, i: i64, j: i64) -> f64 {
        let n = self.grid.n() as i64;
        let w = n as usize + 1;
        let (qa, ra) = (i.div_euclid(n), i.rem_euclid(n) as usize);
        let (qb, rb) = (j.div_euclid(n), j.rem_euclid(n) as usize);
        let t = |a: usize, b: usize| self.table[a * w + b];
        let nn = n as usize;
        (qa * qb) as f64 * t(nn, nn) + qa as f64 * t(nn, rb) + qb as f64 * t(ra, nn) + t(ra, rb)
    }
}

/// Summed-area table: `T[a][b] = Σ_{x<a, y<b} v`, shape `(N+1)^dim`.
fn summed_area(grid: GridSpec, v: &[f64]) -> Vec<f64> {
    let n = grid.n();
    if grid.dim() == 1 {
        let mut t = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        t.push(0.0);
        for &x in v {
            acc += x;
            t.push(acc);
        }
        t
    } else {
        let w = n + 1;
        let mut t = vec![0.0; w * w];
        for a in 0..n {
            let mut row = 0.0;
            for b in 0..n {
                row += v[a * n + b];
                t[(a + 1) * w + b + 1] = t[a * w + b + 1] + row;
            }
        }
        t
    }
}

/// `(⨍_Q |f|^r)^{1/r}`; `r = INF` gives the maximum over `Q`.
pub fn cube_mean_power(f: &SampledFunction, cube: &DyadicCube, r: LpExponent) -> Result<f64> {
    let checked = DyadicCube::new(f.grid(), cube.level, cube.corner)?;
    Ok(CubeMeans::new(f.grid(), &f.abs(), r).mean(&checked))
}

/// Largest `(⨍_Q |f|^r)^{1/r}` over all level-`l` cubes.
pub fn sup_over_cubes(f: &SampledFunction, level: usize, r: LpExponent) -> Result<f64> {
    CubeMeans::new(f.grid(), &f.abs(), r).sup(level)
}
