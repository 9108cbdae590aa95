use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubes::{cubes_at_level, CubeMeans, DyadicCube};
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::grid::{FrequencyField, GridSpec, SampledFunction};
use crate::partition::{project, DyadicPartition, SpectralDecomposition};

use super::kernel::KernelCalibration;

/// Envelope `Ψ` with Fourier coefficients spread evenly over the lattice
/// points of the sphere `|ξ| = 2`, the only lattice radius in `[3/2, 2]`.
/// In 1D this is `cos(2x_1)`.
pub fn envelope(grid: GridSpec) -> FrequencyField {
    let on_shell = |m: [i64; 2]| m[0] * m[0] + m[1] * m[1] == 4;
    let count = (0..grid.len()).filter(|&i| on_shell(grid.frequency_vec(i))).count() as f64;
    FrequencyField::from_fn(grid, |m| {
        if on_shell(m) {
            Complex64::new(1.0 / count, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `min Re Ψ` over the grid (the periodic envelope covers `[-π-1, π+1]^n`).
pub fn envelope_minimum(envelope: &FrequencyField) -> f64 {
    envelope.inverse().values().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// `Ψ(x) Σ_j α_j e^{i 2^j x_1}` with `α` indexed from `j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub m: usize,
    pub alpha: Vec<Complex64>,
    pub envelope: FrequencyField,
}

/// Coefficient patterns for the lower-bound packets, keyed by the range of
/// the smoothness-log exponent `b` they are designed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LowerBoundCase {
    /// `α_j = 1`, for `b ∈ [0, 1/2)`.
    One,
    /// `α_j = (1+j)^{-1/2}`, for `b = 1/2`.
    Two,
    /// `α_j = (1+j)^{-b}`, for `b > 1/2`.
    Three,
    /// `α_j = (1+j)^{-b}`, for `b ∈ [-1/2, 0)`.
    Four,
    /// A single envelope at frequency `2^m`, for `b < -1/2`.
    Five,
}

impl LowerBoundCase {
    pub const ALL: [LowerBoundCase; 5] =
        [LowerBoundCase::One, LowerBoundCase::Two, LowerBoundCase::Three, LowerBoundCase::Four, LowerBoundCase::Five];

    pub fn number(self) -> u8 {
        match self {
            LowerBoundCase::One => 1,
            LowerBoundCase::Two => 2,
            LowerBoundCase::Three => 3,
            LowerBoundCase::Four => 4,
            LowerBoundCase::Five => 5,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        LowerBoundCase::ALL
            .into_iter()
            .find(|c| c.number() == n)
            .ok_or_else(|| Error::Parameter(format!("case must be 1..=5, got {n}")))
    }
}

impl PacketSpec {
    pub fn for_case(grid: GridSpec, m: usize, case: LowerBoundCase, b: f64) -> Self {
        let terms = m.saturating_sub(2);
        let weight = |j: usize, e: f64| Complex64::new((1.0 + j as f64).powf(-e), 0.0);
        let alpha = match case {
            LowerBoundCase::One => vec![Complex64::new(1.0, 0.0); terms],
            LowerBoundCase::Two => (1..=terms).map(|j| weight(j, 0.5)).collect(),
            LowerBoundCase::Three | LowerBoundCase::Four => (1..=terms).map(|j| weight(j, b)).collect(),
            LowerBoundCase::Five => {
                let mut a = vec![Complex64::new(0.0, 0.0); m];
                a[m - 1] = Complex64::new(1.0, 0.0);
                a
            }
        };
        PacketSpec { m, alpha, envelope: envelope(grid) }
    }
}

pub fn make_modulated_packet(spec: &PacketSpec) -> Result<SampledFunction> {
    let grid = spec.envelope.grid();
    let max = grid.k_max().saturating_sub(2);
    if spec.m < 3 || spec.m > max {
        return Err(Error::LevelOverflow { level: spec.m, max });
    }
    if spec.alpha.len() > spec.m {
        return Err(Error::RejectedInput("more coefficients than levels".into()));
    }
    let env = spec.envelope.coeffs();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (idx, &a) in spec.alpha.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let shift = 1i64 << (idx + 1);
        for (i, c) in env.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = grid.frequency_vec(i);
            let target = grid.bin(m[0] + shift).ok_or(Error::Aliasing(m[0] + shift))?;
            let t = if grid.dim() == 2 { target * grid.n() + grid.bin(m[1]).expect("in range") } else { target };
            coeffs[t] += a * c;
        }
    }
    Ok(FrequencyField::new(grid, coeffs)?.inverse())
}

/// Pieces below this fraction of `‖f‖_∞` count as zero (FFT round-off).
const NOISE: f64 = 1e-12;

/// Parameters of the necessity packet `g_k` built from a candidate multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityPacketSpec {
    pub k: usize,
    pub shift: usize,
    pub kernel: KernelCalibration,
    pub p: LpExponent,
    pub b: f64,
    /// Corner indices of `Q_k^{(j)}` (level `k + σ`), one per `j` from `k + shift`;
    /// empty means choose each to maximize `‖S_j f‖_{L^{p'}(Q̃)}`.
    pub cubes: Vec<[i64; 2]>,
}

impl NecessityPacketSpec {
    pub fn new(k: usize, kernel: KernelCalibration, p: LpExponent, b: f64) -> Self {
        NecessityPacketSpec { k, shift: 6, kernel, p, b, cubes: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct NecessityPacket {
    pub function: SampledFunction,
    /// `(j, Q̃_k^{(j)})` for every retained term.
    pub terms: Vec<(usize, DyadicCube)>,
}

/// `g_k = Σ_{j ≥ k+N} (1+j)^{-b} ‖S_j f‖^{1-p'}_{L^{p'}(Q̃)} S_j(1_{Q̃} sgn(S_j f)|S_j f|^{p'-1})`,
/// truncated at `K_max`. Terms with `S_j f = 0` (globally or on `Q̃`) are dropped.
pub fn make_necessity_packet(
    f: &SampledFunction,
    partition: &DyadicPartition,
    spec: &NecessityPacketSpec,
) -> Result<NecessityPacket> {
    let grid = f.grid();
    let q = spec.p.conjugate();
    let LpExponent::Finite(qv) = q else {
        return Err(Error::Parameter("necessity packets need p > 1".into()));
    };
    let level = spec.k + spec.kernel.sigma;
    let first = spec.k + spec.shift;
    let pieces = SpectralDecomposition::new(f, partition)?;
    let offset = spec.kernel.nu0;
    let scale = f.max_abs();
    let mut acc = SampledFunction::zeros(grid);
    let mut terms = Vec::new();
    for j in first..=partition.k_max() {
        let piece = pieces.piece(j);
        if piece.max_abs() <= NOISE * scale {
            continue;
        }
        let moduli = piece.abs();
        let means = CubeMeans::new(grid, &moduli, q);
        let cube = match spec.cubes.get(j - first) {
            Some(&c) => DyadicCube::new(grid, level, [c[0] + offset[0], c[1] + offset[1]])?,
            None => {
                let all = cubes_at_level(grid, level)?;
                let vals = means.level_means(level)?;
                let best = vals.iter().enumerate().fold((0, f64::MIN), |a, (i, &v)| if v > a.1 { (i, v) } else { a }).0;
                all[best]
            }
        };
        let inside = cube.samples(grid);
        let local = (means.raw_mean(&cube) * inside.len() as f64 * grid.cell_volume()).powf(1.0 / qv);
        if !(local > 0.0) {
            continue;
        }
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        for i in inside {
            let z = piece.values()[i];
            if z.norm() > 0.0 {
                values[i] = (z / z.norm()) * z.norm().powf(qv - 1.0);
            }
        }
        let u = SampledFunction::new(grid, values)?;
        let weight = (1.0 + j as f64).powf(-spec.b) * local.powf(1.0 - qv);
        acc = acc.add(&project(&u, partition, j)?.scale(Complex64::new(weight, 0.0)))?;
        terms.push((j, cube));
    }
    if terms.is_empty() {
        return Err(Error::Degenerate("every packet term vanished".into()));
    }
    Ok(NecessityPacket { function: acc, terms })
}
