use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lq_aggregate, tail_estimate, NormReport};
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{lp_norm, lp_norm_of_moduli, FrequencyField, GridSpec, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffParams {
    pub s: f64,
    pub b: f64,
    pub d: f64,
    pub p: LpExponent,
    pub q: LpExponent,
    /// Difference order, must exceed `s`.
    pub m: usize,
}

fn binomial(m: usize, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, r| acc * (m - r) as f64 / (r + 1) as f64)
}

/// Sampled `Δ_h^m f` and its `L^p` norms for a family of shifts, sharing
/// one spectrum.
struct Differences<'a> {
    f: &'a SampledFunction,
    spectrum: FrequencyField,
    order: usize,
    p: LpExponent,
}

impl<'a> Differences<'a> {
    fn new(f: &'a SampledFunction, order: usize, p: LpExponent) -> Self {
        Differences { f, spectrum: FrequencyField::forward(f), order, p }
    }

    /// `‖Δ^m_{s·h} f‖_p` for a whole-sample shift `s`.
    fn grid_shift(&self, s: [i64; 2]) -> f64 {
        let grid = self.f.grid();
        let n = grid.n() as i64;
        let v = self.f.values();
        let coef: Vec<f64> = (0..=self.order)
            .map(|i| if (self.order - i).is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(self.order, i))
            .collect();
        // per-term offsets along each axis, already reduced mod n
        let offsets: Vec<[usize; 2]> = (0..coef.len())
            .map(|i| [(i as i64 * s[0]).rem_euclid(n) as usize, (i as i64 * s[1]).rem_euclid(n) as usize])
            .collect();
        let n = n as usize;
        let wrap = |x: usize| if x >= n { x - n } else { x };
        let moduli: Vec<f64> = if grid.dim() == 1 {
            (0..n)
                .map(|a| coef.iter().zip(&offsets).map(|(&c, o)| c * v[wrap(a + o[0])]).sum::<Complex64>().norm())
                .collect()
        } else {
            (0..grid.len())
                .map(|idx| {
                    let (a, b) = (idx / n, idx % n);
                    coef.iter()
                        .zip(&offsets)
                        .map(|(&c, o)| c * v[wrap(a + o[0]) * n + wrap(b + o[1])])
                        .sum::<Complex64>()
                        .norm()
                })
                .collect()
        };
        lp_norm_of_moduli(&moduli, grid, self.p)
    }

    /// `‖Δ^m_h f‖_p` for an arbitrary real shift, as the multiplier
    /// `(e^{iξ·h} - 1)^m`.
    fn spectral_shift(&self, h: [f64; 2]) -> f64 {
        let grid = self.f.grid();
        let coeffs = self
            .spectrum
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let m = grid.frequency_vec(i);
                let phase = m[0] as f64 * h[0] + m[1] as f64 * h[1];
                c * (Complex64::from_polar(1.0, phase) - 1.0).powu(self.order as u32)
            })
            .collect();
        let d = FrequencyField::new(grid, coeffs).expect("same grid").inverse();
        lp_norm_of_moduli(&d.abs(), grid, self.p)
    }

    /// Shifts with torus length below `t`, one of each `±` pair.
    fn shifts_below(grid: GridSpec, t: f64) -> Vec<[i64; 2]> {
        let r = t / grid.spacing();
        let reach = r.ceil() as i64;
        let mut out = Vec::new();
        if grid.dim() == 1 {
            out.extend((1..reach).filter(|&a| (a as f64) < r).map(|a| [a, 0]));
        } else {
            for a in 0..reach {
                for b in -reach + 1..reach {
                    if (a > 0 || b > 0) && (((a * a + b * b) as f64).sqrt()) < r {
                        out.push([a, b]);
                    }
                }
            }
        }
        out
    }

    /// `ω_m(f, t)` at each of the increasing scales `ts`.
    fn modulus_at(&self, ts: &[f64]) -> Vec<f64> {
        let grid = self.f.grid();
        let Some(&top) = ts.last() else {
            return Vec::new();
        };
        let shifts = Self::shifts_below(grid, top);
        let norms = crate::par::map_slice(&shifts, |&s| self.grid_shift(s));
        let h = grid.spacing();
        let len = |s: &[i64; 2]| h * ((s[0] * s[0] + s[1] * s[1]) as f64).sqrt();
        // exact shifts at the scale itself and at every dyadic scale below it
        let mut dyadic: Vec<f64> = (0..).map(|j| (-(j as f64)).exp2()).take_while(|&d| d >= h).collect();
        dyadic.retain(|&d| d < top);
        dyadic.extend_from_slice(ts);
        dyadic.sort_by(f64::total_cmp);
        dyadic.dedup();
        let spectral = crate::par::map_slice(&dyadic, |&d| {
            (0..grid.dim())
                .map(|a| {
                    let mut v = [0.0; 2];
                    v[a] = d;
                    self.spectral_shift(v)
                })
                .fold(0.0, f64::max)
        });
        ts.iter()
            .map(|&t| {
                let g = shifts.iter().zip(&norms).filter(|(s, _)| len(s) < t).fold(0.0, |m: f64, (_, &v)| m.max(v));
                let e = dyadic.iter().zip(&spectral).filter(|(&d, _)| d <= t).fold(0.0, |m: f64, (_, &v)| m.max(v));
                g.max(e)
            })
            .collect()
    }
}

fn check_scale(grid: GridSpec, t: f64) -> Result<()> {
    if !(t > 0.0 && t <= std::f64::consts::PI) {
        return Err(Error::Parameter(format!("scale must lie in (0, pi], got {t}")));
    }
    if t < grid.spacing() {
        return Err(Error::BelowResolution { scale: t, spacing: grid.spacing() });
    }
    Ok(())
}

/// `ω_m(f, t)_p = sup_{|h|<t} ‖Δ_h^m f‖_{L^p}`. The supremum runs over all
/// whole-sample shifts shorter than `t`, together with exact axis shifts of
/// length `t` and of every dyadic length below `t` (the supremum over the
/// open ball equals the maximum over its closure).
pub fn modulus(f: &SampledFunction, m: usize, t: f64, p: LpExponent) -> Result<f64> {
    if m == 0 {
        return Err(Error::Parameter("difference order must be positive".into()));
    }
    check_scale(f.grid(), t)?;
    Ok(Differences::new(f, m, p).modulus_at(&[t])[0])
}

/// Deepest dyadic scale `2^{-j}` spanning at least two cells.
fn finest_scale(grid: GridSpec) -> usize {
    (1.0 / (2.0 * grid.spacing())).log2().floor() as usize
}

/// Trapezoid weights for `dt/t` over `t_j = 2^{-j}`, `j = lo..=hi`.
fn log_weights(lo: usize, hi: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (lo..=hi).map(|j| if lo == hi { 0.0 } else if j == lo || j == hi { 0.5 * ln2 } else { ln2 }).collect()
}

/// `‖f‖_{L^p} + (∫_0^1 [t^{-s}(1-log t)^b (1+log(1-log t))^d ω_m(f,t)_p]^q dt/t)^{1/q}`
/// on the dyadic scales `t_j = 2^{-j}`, `j = 0..` down to two cells.
pub fn diffspace_norm(f: &SampledFunction, params: DiffParams) -> Result<NormReport> {
    if params.m == 0 || !(params.m as f64 > params.s) {
        return Err(Error::Parameter(format!("order {} must exceed s = {}", params.m, params.s)));
    }
    let grid = f.grid();
    let hi = finest_scale(grid);
    let ts: Vec<f64> = (0..=hi).rev().map(|j| (-(j as f64)).exp2()).collect();
    let mut omegas = Differences::new(f, params.m, params.p).modulus_at(&ts);
    omegas.reverse();
    let per_level: Vec<f64> = omegas
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let t = (-(j as f64)).exp2();
            let l = 1.0 - t.ln();
            t.powf(-params.s) * l.powf(params.b) * (1.0 + l.ln()).powf(params.d) * w
        })
        .collect();
    let weights = log_weights(0, hi);
    let semi = match params.q {
        LpExponent::Inf => lq_aggregate(&per_level, LpExponent::Inf),
        LpExponent::Finite(q) => {
            let weighted: Vec<f64> = per_level.iter().zip(&weights).map(|(&v, &w)| v * w.powf(1.0 / q)).collect();
            lq_aggregate(&weighted, params.q)
        }
    };
    Ok(NormReport {
        value: lp_norm(f, params.p)? + semi,
        tail: tail_estimate(&per_level, params.q),
        band_fraction: 0.0,
        per_level,
    })
}

/// `∫_0^{1/2} ω_1(f,t)_∞ dt/t` on dyadic scales from `1/2` down to two cells.
/// `per_level[i]` is the weighted contribution of `t = 2^{-1-i}`, so the
/// partial sums expose divergence.
pub fn dini_norm(f: &SampledFunction) -> Result<NormReport> {
    let grid = f.grid();
    let hi = finest_scale(grid);
    if hi < 1 {
        return Err(Error::BelowResolution { scale: 0.5, spacing: grid.spacing() });
    }
    let ts: Vec<f64> = (1..=hi).rev().map(|j| (-(j as f64)).exp2()).collect();
    let mut omegas = Differences::new(f, 1, LpExponent::Inf).modulus_at(&ts);
    omegas.reverse();
    let per_level: Vec<f64> = omegas.iter().zip(log_weights(1, hi)).map(|(&w, c)| w * c).collect();
    let value = per_level.iter().sum();
    Ok(NormReport { value, tail: tail_estimate(&per_level, LpExponent::ONE), band_fraction: 0.0, per_level })
}

/// Which dyadic log-sum is bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogSum {
    /// `Σ_{j≥k} (1+j)^{-b}` for `b > 1`, bracketed by `c (k+1)^{1-b}`.
    Tail,
    /// `Σ_{j=0}^{k} (1+j)^b` for `b > -1`, bracketed by `c (k+1)^{b+1}`.
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSumBounds {
    pub sum: f64,
    pub lower: f64,
    pub upper: f64,
}

impl LogSumBounds {
    pub fn holds(&self) -> bool {
        let slack = 1e-12 * self.sum.abs();
        self.lower <= self.sum + slack && self.sum <= self.upper + slack
    }
}

/// Exact sum against the bracket `[(k+1)^e / |b∓1|, C (k+1)^e]`. The upper
/// constants are `b/(b-1)` for the tail, and `2^{b+1}/(b+1)` (`b ≥ 0`) or
/// `1/(b+1)` (`b < 0`) for the head.
pub fn log_sum_bounds(which: LogSum, b: f64, k: usize) -> Result<LogSumBounds> {
    let kk = k as f64 + 1.0;
    match which {
        LogSum::Tail => {
            if !(b > 1.0) {
                return Err(Error::Parameter(format!("tail sum needs b > 1, got {b}")));
            }
            let terms = 4096usize;
            let direct: f64 = (0..terms).rev().map(|i| (kk + i as f64).powf(-b)).sum();
            let x = kk + terms as f64;
            let rest = x.powf(1.0 - b) / (b - 1.0) + 0.5 * x.powf(-b) + b / 12.0 * x.powf(-b - 1.0)
                - b * (b + 1.0) * (b + 2.0) / 720.0 * x.powf(-b - 3.0);
            let scale = kk.powf(1.0 - b);
            Ok(LogSumBounds { sum: direct + rest, lower: scale / (b - 1.0), upper: b / (b - 1.0) * scale })
        }
        LogSum::Head => {
            if !(b > -1.0) {
                return Err(Error::Parameter(format!("head sum needs b > -1, got {b}")));
            }
            let sum: f64 = (0..=k).map(|j| (1.0 + j as f64).powf(b)).sum();
            let scale = kk.powf(b + 1.0);
            let c = if b >= 0.0 { (b + 1.0).exp2() / (b + 1.0) } else { 1.0 / (b + 1.0) };
            Ok(LogSumBounds { sum, lower: scale / (b + 1.0), upper: c * scale })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::make_exponential;
    use std::f64::consts::PI;

    #[test]
    fn modulus_of_first_mode() {
        let g = GridSpec::new(1, 12).unwrap();
        let f = make_exponential(g, [1, 0]).unwrap();
        for j in 0..8 {
            let t = (-(j as f64)).exp2();
            let w = modulus(&f, 1, t, LpExponent::Inf).unwrap();
            assert!((w - 2.0 * (t / 2.0).sin()).abs() < 1e-9, "t={t}: {w}");
            let w2 = modulus(&f, 2, t, LpExponent::Inf).unwrap();
            assert!((w2 - 4.0 * (t / 2.0).sin().powi(2)).abs() < 1e-9);
        }
        assert!(matches!(modulus(&f, 1, 1e-4, LpExponent::Inf), Err(Error::BelowResolution { .. })));
        assert!(modulus(&f, 1, 4.0, LpExponent::Inf).is_err());
    }

    #[test]
    fn modulus_brute_force_second_order() {
        let g = GridSpec::new(1, 7).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex64::new((3.0 * x[0]).sin() + 0.3 * (x[0]).cos(), 0.0));
        let t = 0.4;
        let mut best = 0.0f64;
        let h = g.spacing();
        for s in 1..g.n() as i64 / 2 {
            if (s as f64) * h >= t {
                break;
            }
            let d = f.shifted([2 * s, 0]).sub(&f.shifted([s, 0]).scale(Complex64::new(2.0, 0.0))).unwrap().add(&f).unwrap();
            best = best.max(lp_norm(&d, LpExponent::TWO).unwrap());
        }
        let w = modulus(&f, 2, t, LpExponent::TWO).unwrap();
        assert!(w >= best - 1e-12);
        assert!(w - best < 0.05 * best);
    }

    #[test]
    fn constant_has_no_smoothness_seminorm() {
        let g = GridSpec::new(1, 9).unwrap();
        let c = SampledFunction::constant(g, Complex64::new(2.0, 0.0));
        let params = DiffParams { s: 0.0, b: 1.0, d: 0.5, p: LpExponent::TWO, q: LpExponent::ONE, m: 1 };
        let r = diffspace_norm(&c, params).unwrap();
        assert!((r.value - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-9);
        assert!(dini_norm(&c).unwrap().value < 1e-12);
        assert!(diffspace_norm(&c, DiffParams { m: 1, s: 1.0, ..params }).is_err());
    }

    #[test]
    fn log_sums() {
        let t = log_sum_bounds(LogSum::Tail, 2.0, 0).unwrap();
        assert!((t.sum - PI * PI / 6.0).abs() < 1e-12);
        assert!(t.holds());
        let h = log_sum_bounds(LogSum::Head, 0.0, 9).unwrap();
        assert_eq!((h.sum, h.lower, h.upper), (10.0, 10.0, 20.0));
        let direct: f64 = (4..2_000_000).map(|j| (1.0 + j as f64).powf(-1.5)).sum::<f64>();
        let t = log_sum_bounds(LogSum::Tail, 1.5, 4).unwrap();
        assert!((t.sum - direct).abs() < 2.0 / 2000f64.sqrt());
        assert!(t.holds());
        assert!(log_sum_bounds(LogSum::Tail, 1.0, 3).is_err());
        assert!(log_sum_bounds(LogSum::Head, -1.0, 3).is_err());
        assert!(!log_sum_bounds(LogSum::Head, -0.5, 0).unwrap().holds());
    }
}
