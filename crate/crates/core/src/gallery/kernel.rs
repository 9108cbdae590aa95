use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{DyadicPartition, PartitionKind};

const FREQ_NODES: usize = 6000;
const ANGLE_NODES: usize = 160;

/// Trapezoid rule on `[a, b]`.
fn trapezoid<F: Fn(f64) -> f64>(a: f64, b: f64, nodes: usize, f: F) -> f64 {
    let h = (b - a) / nodes as f64;
    let inner: f64 = (1..nodes).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

/// Bessel `J_0` via its periodic integral representation.
fn bessel_j0(z: f64) -> f64 {
    trapezoid(0.0, PI, ANGLE_NODES, |t| (z * t.sin()).cos()) / PI
}

/// Real-space kernel `ϕ_k = F^{-1} φ_k` at `x`, by quadrature over the
/// symbol's support. In 1D the symbol is integrated directly; in 2D the radial
/// kind uses a Hankel transform and the tensor kind factorizes.
pub fn kernel_value(partition: &DyadicPartition, k: usize, x: [f64; 2]) -> f64 {
    let dim = partition.grid().dim();
    let scale = if k == 0 { 1.0 } else { (k as f64 - 1.0).exp2() };
    if dim == 1 {
        let hi = 1.5 * (k as f64).exp2();
        let lo = if k == 0 { 0.0 } else { scale };
        let v = trapezoid(lo, hi, FREQ_NODES, |xi| partition.level_at(k, [xi, 0.0]) * (x[0] * xi).cos());
        return 2.0 * v / (2.0 * PI).sqrt();
    }
    match partition.kind() {
        PartitionKind::Radial => {
            let r = x[0].hypot(x[1]);
            let hi = 1.5 * (k as f64).exp2();
            let lo = if k == 0 { 0.0 } else { scale };
            trapezoid(lo, hi, FREQ_NODES / 4, |rho| partition.level_at(k, [rho, 0.0]) * bessel_j0(rho * r) * rho)
        }
        PartitionKind::Tensor => {
            let base = |t: f64, c: f64| {
                let v = trapezoid(0.0, 1.5 * c, FREQ_NODES, |xi| partition.level_at(0, [xi / c, 0.0]) * (t * xi).cos());
                2.0 * v / (2.0 * PI).sqrt()
            };
            let full = |c: f64| base(x[0], c) * base(x[1], c);
            if k == 0 {
                full(1.0)
            } else {
                full((k as f64).exp2()) - full((k as f64 - 1.0).exp2())
            }
        }
    }
}

/// Outcome of the kernel positivity search: `ϕ_1 ≥ λ` on the box
/// `2^{-σ}(ν_0 ± [0,1)^n)`, which lies in `{x_n ≥ 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCalibration {
    pub sigma: usize,
    pub nu0: [i64; 2],
    pub lambda: f64,
}

/// Grid search over `σ ≤ sigma_max` and `ν_0` with `|ν_0| ∈ (2^σ, 3·2^σ)`
/// maximizing the minimum of `ϕ_1` on the associated box.
pub fn calibrate_kernel(partition: &DyadicPartition, sigma_max: usize) -> Result<KernelCalibration> {
    let dim = partition.grid().dim();
    let samples = if dim == 1 { 33 } else { 7 };
    let mut candidates = Vec::new();
    for sigma in 0..=sigma_max {
        let s = 1i64 << sigma;
        if dim == 1 {
            candidates.extend((s + 1..3 * s).map(|v| (sigma, [v, 0])));
        } else {
            for a in -3 * s..=3 * s {
                for b in 1..3 * s {
                    let r2 = a * a + b * b;
                    if r2 > s * s && r2 < 9 * s * s {
                        candidates.push((sigma, [a, b]));
                    }
                }
            }
        }
    }
    let mins = crate::par::map_slice(&candidates, |&(sigma, nu)| {
        let e = (-(sigma as f64)).exp2();
        let axis = |v: i64, i: usize| e * ((v - 1) as f64 + 2.0 * i as f64 / (samples - 1) as f64);
        let mut m = f64::INFINITY;
        for i in 0..samples {
            if dim == 1 {
                m = m.min(kernel_value(partition, 1, [axis(nu[0], i), 0.0]));
            } else {
                for j in 0..samples {
                    let y = axis(nu[1], j);
                    if y < 0.0 {
                        continue;
                    }
                    m = m.min(kernel_value(partition, 1, [axis(nu[0], i), y]));
                }
            }
        }
        m
    });
    let (best, lambda) = mins
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if !(lambda > 0.0) {
        return Err(Error::Calibration { best_lambda: lambda });
    }
    let (sigma, nu0) = candidates[best];
    Ok(KernelCalibration { sigma, nu0, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn kernel_at_origin_is_mean_of_symbol() {
        let g = GridSpec::new(1, 8).unwrap();
        let p = DyadicPartition::build(g, PartitionKind::Radial);
        let direct = trapezoid(-3.0, 3.0, 20000, |xi| p.level_at(1, [xi, 0.0])) / (2.0 * PI).sqrt();
        assert!((kernel_value(&p, 1, [0.0, 0.0]) - direct).abs() < 1e-10);
        assert!(direct > 0.0);
    }

    #[test]
    fn kernel_scaling_between_levels() {
        let g = GridSpec::new(1, 8).unwrap();
        let p = DyadicPartition::build(g, PartitionKind::Radial);
        for k in 2..=4usize {
            for &x in &[0.0, 0.1, 0.37, 0.9] {
                let c = (k as f64 - 1.0).exp2();
                let lhs = kernel_value(&p, k, [x, 0.0]);
                let rhs = c * kernel_value(&p, 1, [c * x, 0.0]);
                assert!((lhs - rhs).abs() < 1e-8 * c, "k={k} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn tensor_kernel_matches_direct_quadrature() {
        let g = GridSpec::new(2, 6).unwrap();
        let p = DyadicPartition::build(g, PartitionKind::Tensor);
        let v = kernel_value(&p, 1, [0.0, 0.0]);
        let direct = {
            let n = 400;
            let h = 6.0 / n as f64;
            let mut s = 0.0;
            for i in 0..=n {
                for j in 0..=n {
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 } * if j == 0 || j == n { 0.5 } else { 1.0 };
                    s += w * p.level_at(1, [-3.0 + i as f64 * h, -3.0 + j as f64 * h]);
                }
            }
            s * h * h / (2.0 * PI)
        };
        assert!((v - direct).abs() < 1e-6, "{v} vs {direct}");
    }

    #[test]
    fn calibration_finds_positive_cell() {
        let g = GridSpec::new(1, 8).unwrap();
        let p = DyadicPartition::build(g, PartitionKind::Radial);
        let c = calibrate_kernel(&p, 4).unwrap();
        assert!(c.lambda > 0.0);
        let s = 1i64 << c.sigma;
        assert!(c.nu0[0] > s && c.nu0[0] < 3 * s);
        let peak = (0..400).map(|i| kernel_value(&p, 1, [i as f64 * 0.01, 0.0])).fold(f64::MIN, f64::max);
        assert!(c.lambda <= peak);
    }
}
