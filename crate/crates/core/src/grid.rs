//! Periodic sampling grid over `[-π, π)^dim`, sampled functions, discrete
//! Fourier transforms and `L^p` norms.
//!
//! Samples sit at `x_i = -π + i·2π/N`. Fourier coefficients follow the
//! Fourier-series convention `f(x) = Σ_m c_m e^{i m·x}` with integer
//! frequencies `m ∈ [-N/2, N/2)^dim`, so `e^{ik·x}` has a single unit
//! coefficient. Internally spectra are kept in FFT order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::LpExponent;

/// Minimum samples per cube edge accepted by cube queries.
pub const MIN_CUBE_SAMPLES: f64 = 8.0;

/// Shape of the sampling grid: `N = 2^log2_samples` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    #[serde(rename = "J")]
    log2_samples: u32,
}

impl GridSpec {
    pub fn new(dim: usize, log2_samples: u32) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(6..=24).contains(&log2_samples) {
            return Err(Error::InvalidGrid(format!(
                "log2 samples must lie in 6..=24, got {log2_samples}"
            )));
        }
        Ok(GridSpec { dim, log2_samples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log2_samples(&self) -> u32 {
        self.log2_samples
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        1usize << self.log2_samples
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing `2π/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n() as f64
    }

    /// Riemann-sum cell weight `(2π/N)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Deepest Littlewood-Paley level `J - 2`.
    pub fn k_max(&self) -> usize {
        self.log2_samples as usize - 2
    }

    /// Deepest dyadic cube level whose edge spans at least eight samples.
    pub fn cube_level_max(&self) -> usize {
        let ratio = 1.0 / (MIN_CUBE_SAMPLES * self.spacing());
        ratio.log2().floor().max(0.0) as usize
    }

    /// Coordinate of sample `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -PI + i as f64 * self.spacing()
    }

    /// Integer frequency carried by FFT bin `i`.
    pub fn frequency(&self, i: usize) -> i64 {
        let n = self.n();
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// FFT bin of integer frequency `m`, if representable.
    pub fn bin(&self, m: i64) -> Option<usize> {
        let half = (self.n() / 2) as i64;
        if m < -half || m >= half {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n() as i64) as usize)
        }
    }

    /// Multi-index of flat sample (or bin) index `idx`, axis 0 slowest.
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        let n = self.n();
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / n, idx % n]
        }
    }

    /// Sample position of flat index `idx` (second entry unused in 1D).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.unravel(idx);
        [self.coord(a), if self.dim == 2 { self.coord(b) } else { 0.0 }]
    }

    /// Integer frequency vector of flat bin index `idx`.
    pub fn frequency_vec(&self, idx: usize) -> [i64; 2] {
        let [a, b] = self.unravel(idx);
        [self.frequency(a), if self.dim == 2 { self.frequency(b) } else { 0 }]
    }

    /// Euclidean length of the frequency at flat bin `idx`.
    pub fn frequency_norm(&self, idx: usize) -> f64 {
        let [a, b] = self.frequency_vec(idx);
        ((a * a + b * b) as f64).sqrt()
    }
}

/// Complex samples of a function on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::RejectedInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; 2]) -> Complex64 + Sync + Send,
    {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        crate::par::fill_indexed(&mut values, |i| f(grid.point(i)));
        SampledFunction { grid, values }
    }

    pub fn constant(grid: GridSpec, c: Complex64) -> Self {
        SampledFunction { grid, values: vec![c; grid.len()] }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Pointwise moduli.
    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        SampledFunction { grid: self.grid, values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(SampledFunction { grid: self.grid, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Cyclic shift by whole samples: `g(x) = f(x + shift·h)`.
    pub fn shifted(&self, shift: [i64; 2]) -> Self {
        let n = self.grid.n() as i64;
        let wrap = |i: usize, s: i64| ((i as i64 + s).rem_euclid(n)) as usize;
        let values = (0..self.grid.len())
            .map(|idx| {
                let [a, b] = self.grid.unravel(idx);
                let src = if self.grid.dim() == 1 {
                    wrap(a, shift[0])
                } else {
                    wrap(a, shift[0]) * n as usize + wrap(b, shift[1])
                };
                self.values[src]
            })
            .collect();
        SampledFunction { grid: self.grid, values }
    }

    /// Grid sum times the cell volume.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Fourier coefficients `c_m`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl FrequencyField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::RejectedInput(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(FrequencyField { grid, coeffs })
    }

    /// Build coefficients from a function of the integer frequency vector.
    pub fn from_fn<F: Fn([i64; 2]) -> Complex64>(grid: GridSpec, f: F) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(grid.frequency_vec(i))).collect();
        FrequencyField { grid, coeffs }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Coefficients in FFT order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at integer frequency `m` (zero when not representable).
    pub fn coeff(&self, m: [i64; 2]) -> Complex64 {
        let a = self.grid.bin(m[0]);
        let b = if self.grid.dim() == 2 { self.grid.bin(m[1]) } else { Some(0) };
        match (a, b) {
            (Some(a), Some(b)) if self.grid.dim() == 2 => self.coeffs[a * self.grid.n() + b],
            (Some(a), Some(_)) => self.coeffs[a],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `Σ|c_m|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn forward(f: &SampledFunction) -> Self {
        let grid = f.grid();
        let mut buf = f.values().to_vec();
        dft(grid, &mut buf, Direction::Forward);
        let norm = 1.0 / grid.len() as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            let [a, b] = grid.frequency_vec(i);
            let sign = if (a + b).rem_euclid(2) == 0 { norm } else { -norm };
            *c *= sign;
        }
        FrequencyField { grid, coeffs: buf }
    }

    pub fn inverse(&self) -> SampledFunction {
        let grid = self.grid;
        let mut buf = self.coeffs.clone();
        for (i, c) in buf.iter_mut().enumerate() {
            let [a, b] = grid.frequency_vec(i);
            if (a + b).rem_euclid(2) != 0 {
                *c = -*c;
            }
        }
        dft(grid, &mut buf, Direction::Inverse);
        SampledFunction { grid, values: buf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized multidimensional DFT in place (FFT order on the spectral side).
pub(crate) fn dft(grid: GridSpec, buf: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    let mut planner = FftPlanner::<f64>::new();
    let fft = match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    fft.process(buf);
    if grid.dim() == 2 {
        let mut t = transpose(buf, n);
        fft.process(&mut t);
        buf.copy_from_slice(&transpose(&t, n));
    }
}

fn transpose(buf: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); buf.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = buf[i * n + j];
        }
    }
    out
}

/// Apply a real Fourier multiplier given in FFT order, `IFFT(m·FFT f)`.
pub(crate) fn apply_multiplier(f: &SampledFunction, spectrum: &[Complex64], symbol: &[f64]) -> SampledFunction {
    let grid = f.grid();
    let norm = 1.0 / grid.len() as f64;
    let mut buf: Vec<Complex64> =
        spectrum.iter().zip(symbol).map(|(c, &s)| c * (s * norm)).collect();
    dft(grid, &mut buf, Direction::Inverse);
    SampledFunction { grid, values: buf }
}

/// Raw (unnormalized, unphased) FFT of the samples.
pub(crate) fn raw_spectrum(f: &SampledFunction) -> Vec<Complex64> {
    let mut buf = f.values().to_vec();
    dft(f.grid(), &mut buf, Direction::Forward);
    buf
}

/// `L^p` norm as a Riemann sum; `INF` is the maximum modulus.
pub fn lp_norm(f: &SampledFunction, p: LpExponent) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::RejectedInput("non-finite samples".into()));
    }
    Ok(lp_norm_of_moduli(&f.abs(), f.grid(), p))
}

/// `L^p` norm of a sampled nonnegative field.
pub fn lp_norm_of_moduli(moduli: &[f64], grid: GridSpec, p: LpExponent) -> f64 {
    match p {
        LpExponent::Inf => moduli.iter().fold(0.0, |m, &v| m.max(v)),
        LpExponent::Finite(p) => {
            let scale = moduli.iter().fold(0.0f64, |m, &v| m.max(v));
            if scale == 0.0 {
                return 0.0;
            }
            let s: f64 = moduli.iter().map(|&v| (v / scale).powf(p)).sum();
            scale * (s * grid.cell_volume()).powf(1.0 / p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_d(j: u32) -> GridSpec {
        GridSpec::new(1, j).unwrap()
    }

    #[test]
    fn grid_guards() {
        assert!(GridSpec::new(3, 10).is_err());
        assert!(GridSpec::new(1, 5).is_err());
        let g = one_d(14);
        assert_eq!(g.n(), 16384);
        assert_eq!(g.k_max(), 12);
        assert!(3 * (1usize << (g.k_max() - 1)) <= g.n() / 2);
        assert_eq!(g.cube_level_max(), 8);
        let edge = (-(g.cube_level_max() as f64)).exp2();
        assert!(edge / g.spacing() >= MIN_CUBE_SAMPLES);
        assert!(edge / 2.0 / g.spacing() < MIN_CUBE_SAMPLES);
    }

    #[test]
    fn constant_norms() {
        let g = one_d(10);
        let f = SampledFunction::constant(g, Complex64::new(1.0, 0.0));
        assert_relative_eq!(lp_norm(&f, LpExponent::TWO).unwrap(), (2.0 * PI).sqrt(), max_relative = 1e-13);
        assert_eq!(lp_norm(&f, LpExponent::Inf).unwrap(), 1.0);
    }

    #[test]
    fn sine_l2() {
        let g = one_d(12);
        let f = SampledFunction::from_fn(g, |x| Complex64::new(x[0].sin(), 0.0));
        assert!((lp_norm(&f, LpExponent::TWO).unwrap() - PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn rejects_nan() {
        let g = one_d(6);
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        v[3] = Complex64::new(f64::NAN, 0.0);
        let f = SampledFunction::new(g, v).unwrap();
        assert!(matches!(lp_norm(&f, LpExponent::ONE), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn exponential_has_single_coefficient() {
        for g in [one_d(8), GridSpec::new(2, 6).unwrap()] {
            let k = [5i64, if g.dim() == 2 { -3 } else { 0 }];
            let f = SampledFunction::from_fn(g, |x| {
                Complex64::from_polar(1.0, k[0] as f64 * x[0] + k[1] as f64 * x[1])
            });
            let c = FrequencyField::forward(&f);
            for i in 0..g.len() {
                let m = g.frequency_vec(i);
                let expected = if m == k { 1.0 } else { 0.0 };
                assert!((c.coeffs()[i] - expected).norm() < 1e-12, "bin {m:?}");
            }
            assert!((c.coeff(k) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_and_parseval_2d() {
        let g = GridSpec::new(2, 6).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex64::new((x[0] * 3.0).cos() + x[1], x[0] * x[1]));
        let c = FrequencyField::forward(&f);
        let back = c.inverse();
        let err = f.sub(&back).unwrap().max_abs();
        assert!(err < 1e-12 * f.max_abs());
        let l2 = lp_norm(&f, LpExponent::TWO).unwrap();
        assert_relative_eq!(l2 * l2, (2.0 * PI).powi(2) * c.energy(), max_relative = 1e-10);
    }

    #[test]
    fn shifts_are_cyclic() {
        let g = one_d(6);
        let f = SampledFunction::from_fn(g, |x| Complex64::new(x[0], 0.0));
        let s = f.shifted([1, 0]);
        assert_eq!(s.values()[0], f.values()[1]);
        assert_eq!(s.values()[63], f.values()[0]);
    }
}
