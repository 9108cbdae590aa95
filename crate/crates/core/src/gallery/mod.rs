//! Explicit test functions: exponentials, indicators, localized bumps and
//! their stacks, exponential stacks, and the packets used for lower bounds.

mod bump;
mod kernel;
mod packets;

pub use bump::{make_bump, make_stack, BumpSpec, StackSpec};
pub use kernel::{calibrate_kernel, kernel_value, KernelCalibration};
pub use packets::{
    envelope, envelope_minimum, make_modulated_packet, make_necessity_packet, LowerBoundCase, NecessityPacket,
    NecessityPacketSpec, PacketSpec,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{lp_norm, FrequencyField, GridSpec, SampledFunction};
use crate::partition::DyadicPartition;

/// `e^{i k·x}` for an integer frequency vector (`k[1]` ignored in 1D).
pub fn make_exponential(grid: GridSpec, k: [i64; 2]) -> Result<SampledFunction> {
    let half = (grid.n() / 2) as i64;
    for &c in &k[..grid.dim()] {
        if c.abs() >= half {
            return Err(Error::Aliasing(c));
        }
    }
    let k1 = if grid.dim() == 2 { k[1] } else { 0 };
    let field = FrequencyField::from_fn(grid, |m| {
        if m[0] == k[0] && m[1] == k1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(field.inverse())
}

/// Region whose indicator is sampled by [`make_indicator`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorShape {
    /// `{x_n ≥ 0}` clipped to the domain.
    HalfSpace,
    /// The open cube `(-1, 1)^n`.
    Cube,
    /// Half-open box `[lo, hi)` inside the domain.
    Rect { lo: [f64; 2], hi: [f64; 2] },
}

/// `{0,1}`-valued samples of an indicator function.
pub fn make_indicator(grid: GridSpec, shape: IndicatorShape) -> Result<SampledFunction> {
    let d = grid.dim();
    if let IndicatorShape::Rect { lo, hi } = shape {
        for a in 0..d {
            if lo[a] < -PI || hi[a] > PI || lo[a] > hi[a] {
                return Err(Error::RejectedInput("rectangle must lie inside [-pi, pi)".into()));
            }
        }
    }
    Ok(SampledFunction::from_fn(grid, move |x| {
        let inside = match shape {
            IndicatorShape::HalfSpace => x[d - 1] >= 0.0,
            IndicatorShape::Cube => (0..d).all(|a| x[a] > -1.0 && x[a] < 1.0),
            IndicatorShape::Rect { lo, hi } => (0..d).all(|a| x[a] >= lo[a] && x[a] < hi[a]),
        };
        Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// `Σ_{l=0}^{k} (1+l)^{-b} e^{i 2^l (x_1 - z)}`.
pub fn make_exp_stack(grid: GridSpec, k: usize, b: f64, anchor: f64) -> Result<SampledFunction> {
    let max = grid.k_max() - 1;
    if k > max {
        return Err(Error::LevelOverflow { level: k, max });
    }
    let weights: Vec<(i64, Complex64)> = (0..=k)
        .map(|l| {
            let freq = 1i64 << l;
            let w = (1.0 + l as f64).powf(-b);
            (freq, Complex64::from_polar(w, -(freq as f64) * anchor))
        })
        .collect();
    let field = FrequencyField::from_fn(grid, |m| {
        if m[1] != 0 {
            return Complex64::new(0.0, 0.0);
        }
        weights.iter().find(|(f, _)| *f == m[0]).map(|(_, c)| *c).unwrap_or_default()
    });
    Ok(field.inverse())
}

/// Convolve with a normalized Gaussian of standard deviation `width`
/// (periodized), computed as a Fourier multiplier.
pub fn mollify(f: &SampledFunction, width: f64) -> SampledFunction {
    let c = FrequencyField::forward(f);
    let grid = f.grid();
    let coeffs = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let r = grid.frequency_norm(i);
            z * (-0.5 * (width * r).powi(2)).exp()
        })
        .collect();
    FrequencyField::new(grid, coeffs).expect("same grid").inverse()
}

/// Random trigonometric polynomial with frequencies `|ξ_i| < band`.
/// Coefficients are uniform in the unit square of `ℂ`, scaled by
/// `(1 + |ξ|)^{-decay}`; the same seed gives the same field.
pub fn random_band_limited(grid: GridSpec, band: i64, decay: f64, seed: u64) -> Result<SampledFunction> {
    let half = (grid.n() / 2) as i64;
    if band < 1 || band > half {
        return Err(Error::Parameter(format!("band must lie in 1..={half}, got {band}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    // draw in a fixed order independent of the FFT layout
    let side = (2 * band - 1) as usize;
    let count = side.pow(dim as u32);
    let draws: Vec<Complex64> =
        (0..count).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let field = FrequencyField::from_fn(grid, |m| {
        let inside = m[..dim].iter().all(|c| c.abs() < band);
        if !inside {
            return Complex64::new(0.0, 0.0);
        }
        let mut idx = 0usize;
        for c in &m[..dim] {
            idx = idx * side + (c + band - 1) as usize;
        }
        let r = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt();
        draws[idx] * (1.0 + r).powf(-decay)
    });
    Ok(field.inverse())
}

/// One summand `w ϕ_j(· - center) / ‖ϕ_j‖_{L^p}` of a kernel stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub level: usize,
    pub weight: f64,
    pub center: [f64; 2],
}

impl KernelTerm {
    pub fn at_origin(level: usize, weight: f64) -> Self {
        KernelTerm { level, weight, center: [0.0, 0.0] }
    }
}

/// `Σ w ϕ_j(· - c) / ‖ϕ_j‖_{L^p}`, where `ϕ_j` is the grid kernel of the
/// `j`-th partition symbol. Each summand lives on the `j`-th annulus.
pub fn make_kernel_stack(partition: &DyadicPartition, p: LpExponent, terms: &[KernelTerm]) -> Result<SampledFunction> {
    let grid = partition.grid();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for t in terms {
        if t.level > partition.k_max() {
            return Err(Error::LevelOutOfRange { level: t.level, max: partition.k_max() });
        }
        let symbol = partition.symbol(t.level);
        let kernel = FrequencyField::new(grid, symbol.iter().map(|&v| Complex64::new(v, 0.0)).collect())?.inverse();
        let scale = t.weight / lp_norm(&kernel, p)?;
        for (i, (c, &v)) in coeffs.iter_mut().zip(symbol).enumerate() {
            let m = grid.frequency_vec(i);
            let phase = -(m[0] as f64 * t.center[0] + m[1] as f64 * t.center[1]);
            *c += Complex64::from_polar(scale * v, phase);
        }
    }
    Ok(FrequencyField::new(grid, coeffs)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::LpExponent;
    use crate::grid::lp_norm;
    use crate::partition::{project, DyadicPartition, PartitionKind};

    #[test]
    fn exponential_basics() {
        let g = GridSpec::new(1, 10).unwrap();
        let one = make_exponential(g, [0, 0]).unwrap();
        assert!(one.values().iter().all(|z| (z - 1.0).norm() < 1e-14));
        assert!(matches!(make_exponential(g, [512, 0]), Err(Error::Aliasing(512))));
        let p = DyadicPartition::build(g, PartitionKind::Radial);
        let f = make_exponential(g, [64, 0]).unwrap();
        assert!(project(&f, &p, 6).unwrap().sub(&f).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn indicators() {
        let g = GridSpec::new(1, 10).unwrap();
        let full = make_indicator(g, IndicatorShape::Rect { lo: [-PI, -PI], hi: [PI, PI] }).unwrap();
        assert!(full.values().iter().all(|z| z.re == 1.0));
        let cube = make_indicator(g, IndicatorShape::Cube).unwrap();
        assert_eq!(lp_norm(&cube, LpExponent::Inf).unwrap(), 1.0);
        assert!(cube.values().iter().all(|z| z.re == 0.0 || z.re == 1.0));
        let area = cube.integral().re;
        assert!((area - 2.0).abs() <= 2.0 * g.spacing());
        let g2 = GridSpec::new(2, 6).unwrap();
        let half = make_indicator(g2, IndicatorShape::HalfSpace).unwrap();
        assert!((half.integral().re - 2.0 * PI * PI).abs() < 1e-9);
        assert!(make_indicator(g, IndicatorShape::Rect { lo: [-4.0, 0.0], hi: [0.0, 0.0] }).is_err());
    }

    #[test]
    fn exp_stack_of_depth_zero() {
        let g = GridSpec::new(1, 9).unwrap();
        let s = make_exp_stack(g, 0, 3.0, 0.0).unwrap();
        let e = make_exponential(g, [1, 0]).unwrap();
        assert!(s.sub(&e).unwrap().max_abs() < 1e-13);
        assert!(make_exp_stack(g, g.k_max(), 0.0, 0.0).is_err());
    }

    #[test]
    fn random_fields_are_seeded_and_band_limited() {
        let g = GridSpec::new(1, 9).unwrap();
        let a = random_band_limited(g, 20, 1.0, 7).unwrap();
        assert_eq!(a, random_band_limited(g, 20, 1.0, 7).unwrap());
        assert_ne!(a, random_band_limited(g, 20, 1.0, 8).unwrap());
        let c = FrequencyField::forward(&a);
        assert!(c.coeff([20, 0]).norm() < 1e-13 && c.coeff([19, 0]).norm() > 0.0);
        assert!(random_band_limited(g, 0, 1.0, 0).is_err());
    }

    #[test]
    fn kernel_stack_pieces_have_unit_norm() {
        let g = GridSpec::new(1, 10).unwrap();
        let part = DyadicPartition::build(g, PartitionKind::Radial);
        for p in [LpExponent::ONE, LpExponent::Inf] {
            let k = make_kernel_stack(&part, p, &[KernelTerm::at_origin(5, 2.0)]).unwrap();
            assert!((lp_norm(&k, p).unwrap() - 2.0).abs() < 1e-12);
            // whole-cell shifts permute the samples; other shifts resample the kernel
            let cell = 2.0 * PI / g.n() as f64;
            let on_grid = KernelTerm { level: 5, weight: 2.0, center: [37.0 * cell, 0.0] };
            let t = make_kernel_stack(&part, p, &[on_grid]).unwrap();
            assert!((lp_norm(&t, p).unwrap() - 2.0).abs() < 1e-9);
            let off_grid = KernelTerm { level: 5, weight: 2.0, center: [1.0, 0.0] };
            let t = make_kernel_stack(&part, p, &[off_grid]).unwrap();
            assert!((lp_norm(&t, p).unwrap() - 2.0).abs() < 0.05);
        }
        assert!(make_kernel_stack(&part, LpExponent::ONE, &[KernelTerm::at_origin(9, 1.0)]).is_err());
    }

    #[test]
    fn mollified_constant_is_unchanged() {
        let g = GridSpec::new(1, 8).unwrap();
        let c = SampledFunction::constant(g, Complex64::new(2.0, 0.0));
        assert!(mollify(&c, 0.1).sub(&c).unwrap().max_abs() < 1e-13);
    }
}
