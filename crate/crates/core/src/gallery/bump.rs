use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{GridSpec, SampledFunction};
use crate::partition::smoothstep;

/// A dilated, translated copy `h_l(x) = h(2^{l-2}(x - anchor))` of the base bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub level: usize,
    pub anchor: [f64; 2],
}

impl BumpSpec {
    /// Bump whose positive plateau is the dyadic cube `2^{-l}(ν + [0,1)^n)`.
    pub fn on_cube(level: usize, corner: [i64; 2]) -> Self {
        let e = (-(level as f64)).exp2();
        BumpSpec { level, anchor: [corner[0] as f64 * e, corner[1] as f64 * e] }
    }

    fn scale(&self) -> f64 {
        (self.level as f64 - 2.0).exp2()
    }

    /// Support `[anchor - 2^{-l-1}, anchor + 7·2^{-l-1}]` along each axis.
    pub fn support(&self) -> (f64, f64) {
        let half = (-(self.level as f64) - 1.0).exp2();
        (-half, 7.0 * half)
    }
}

/// Plateau of the base bump along one axis: 1 on `[0, 1/4]`, 0 outside
/// `(-1/8, 3/8)`, smoothstep in between.
fn plateau(t: f64) -> f64 {
    if t <= -0.125 || t >= 0.375 {
        0.0
    } else if t < 0.0 {
        smoothstep((t + 0.125) * 8.0)
    } else if t <= 0.25 {
        1.0
    } else {
        smoothstep((0.375 - t) * 8.0)
    }
}

/// Samples of `h_l`. The base bump is `P(x) - P(x - (1/2, …, 1/2))` with
/// `P` the tensor plateau, so `h = 1` on `[0,1/4)^n`, `h = -1` on
/// `[1/2,3/4)^n`, `|h| ≤ 1` and `supp h ⊂ [-1/8, 7/8]^n`. The negative lobe
/// is placed by a whole-sample shift of the positive one, which makes the
/// grid sum vanish; any rounding residue is removed on the support.
pub fn make_bump(grid: GridSpec, spec: BumpSpec) -> Result<SampledFunction> {
    let d = grid.dim();
    let (lo, hi) = spec.support();
    for a in 0..d {
        if spec.anchor[a] + lo < -PI || spec.anchor[a] + hi >= PI {
            return Err(Error::SupportOverflow);
        }
    }
    let s = spec.scale();
    let shift = ((0.5 / s) / grid.spacing()).round() as i64;
    let positive = SampledFunction::from_fn(grid, |x| {
        let v: f64 = (0..d).map(|a| plateau(s * (x[a] - spec.anchor[a]))).product();
        Complex64::new(v, 0.0)
    });
    let negative = positive.shifted([-shift, if d == 2 { -shift } else { 0 }]);
    let mut values: Vec<Complex64> = positive.values().iter().zip(negative.values()).map(|(a, b)| a - b).collect();
    let residue: Complex64 = values.iter().sum();
    let support: Vec<usize> = (0..values.len()).filter(|&i| values[i].norm() > 0.0).collect();
    if !support.is_empty() {
        let c = residue / support.len() as f64;
        for i in support {
            values[i] -= c;
        }
    }
    SampledFunction::new(grid, values)
}

/// Parameters of `g_{N,N_0} = Σ_l i^l 2^{(lm+N_0)n/p} (1+lm+N_0)^{-b} h_{lm+N_0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSpec {
    pub spacing: usize,
    pub offset: usize,
    pub depth: usize,
    pub p: LpExponent,
    pub b: f64,
    /// Anchor (lower-left plateau corner) of each level, shallowest first.
    pub anchors: Vec<[f64; 2]>,
}

impl StackSpec {
    /// Nested anchors: every level shares the corner `(-1, …, -1)`, a dyadic
    /// point of every level, so each anchor cube sits inside the previous one.
    pub fn nested(spacing: usize, offset: usize, depth: usize, p: LpExponent, b: f64) -> Self {
        let count = Self::count(spacing, offset, depth);
        StackSpec { spacing, offset, depth, p, b, anchors: vec![[-1.0, -1.0]; count] }
    }

    fn count(spacing: usize, offset: usize, depth: usize) -> usize {
        if depth < offset {
            0
        } else {
            (depth - offset) / spacing.max(1) + 1
        }
    }

    /// Levels `lm + N_0 ≤ N`.
    pub fn levels(&self) -> Vec<usize> {
        (0..Self::count(self.spacing, self.offset, self.depth)).map(|l| l * self.spacing + self.offset).collect()
    }

    /// Coefficient `i^l 2^{Ln/p} (1+L)^{-b}` of the `l`-th term, `L = lm + N_0`.
    pub fn coefficient(&self, l: usize, dim: usize) -> Complex64 {
        let level = (l * self.spacing + self.offset) as f64;
        let mag = (level * dim as f64 * self.p.reciprocal()).exp2() * (1.0 + level).powf(-self.b);
        Complex64::new(0.0, 1.0).powu(l as u32) * mag
    }

    /// Magnitude `2^{Ln/p}(1+L)^{-b}` of the `l`-th coefficient.
    pub fn magnitude(&self, l: usize, dim: usize) -> f64 {
        self.coefficient(l, dim).norm()
    }
}

pub fn make_stack(grid: GridSpec, spec: &StackSpec) -> Result<SampledFunction> {
    if spec.spacing == 0 {
        return Err(Error::Parameter("stack spacing must be positive".into()));
    }
    let levels = spec.levels();
    let max = grid.k_max() - 1;
    if let Some(&deepest) = levels.last() {
        if deepest > max {
            return Err(Error::LevelOverflow { level: deepest, max });
        }
    }
    if spec.anchors.len() < levels.len() {
        return Err(Error::RejectedInput("one anchor per stack level is required".into()));
    }
    let mut acc = SampledFunction::zeros(grid);
    for (l, &level) in levels.iter().enumerate() {
        let bump = make_bump(grid, BumpSpec { level, anchor: spec.anchors[l] })?;
        acc = acc.add(&bump.scale(spec.coefficient(l, grid.dim())))?;
    }
    Ok(acc)
}
