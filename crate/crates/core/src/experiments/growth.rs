use serde::{Deserialize, Serialize};

use super::{fit_slope, ratio_spread, ExperimentConfig, EXPONENT_TOLERANCE, RATIO_SPREAD};
use crate::criteria::{verdict, Analysis};
use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::gallery::{make_exponential, make_modulated_packet, LowerBoundCase, PacketSpec};
use crate::norms::BesovParams;
use crate::paraproduct::multiplier_lower_bound;
use crate::partition::{DyadicPartition, PartitionKind};

/// How the growth value at a sweep point is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMethod {
    /// `‖f‖_∞` plus both sufficiency terms, `p = 1`.
    Criterion,
    /// The two closed-form terms for `p = ∞`.
    Closed,
    /// Test-packet lower bound for the multiplier norm, `1 < p < ∞`.
    LowerBound,
}

/// Predicted growth `base(m)^exponent` with `base = 1+m`, or
/// `(1+m) ln(1+m)` at the critical `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthForm {
    pub exponent: f64,
    pub log_corrected: bool,
}

impl GrowthForm {
    pub fn base(&self, m: usize) -> f64 {
        let x = 1.0 + m as f64;
        if self.log_corrected {
            x * x.ln()
        } else {
            x
        }
    }

    pub fn predict(&self, m: usize) -> f64 {
        self.base(m).powf(self.exponent)
    }

    pub fn describe(&self) -> String {
        let base = if self.log_corrected { "[(1+m)ln(1+m)]" } else { "(1+m)" };
        if self.exponent == 1.0 {
            base.trim_start_matches('[').trim_end_matches(']').to_string()
        } else {
            format!("{base}^{}", self.exponent)
        }
    }
}

/// Critical smoothness-log exponent separating the regimes: `1` for
/// `p ∈ {1, ∞}`, `1/p` on `(1, 2]`, `1/2` above.
fn pivot(p: LpExponent) -> f64 {
    match p {
        LpExponent::Inf => 1.0,
        LpExponent::Finite(v) if v <= 1.0 => 1.0,
        LpExponent::Finite(v) if v <= 2.0 => 1.0 / v,
        LpExponent::Finite(_) => 0.5,
    }
}

/// Growth in `m = log_2|k|` of `‖e^{ik·x}‖_M` on `B^{0,b}_{p,∞}`.
pub fn growth_form(p: LpExponent, b: f64) -> GrowthForm {
    let c = pivot(p);
    if b > c {
        GrowthForm { exponent: b, log_corrected: false }
    } else if b == c {
        GrowthForm { exponent: c, log_corrected: true }
    } else if b >= -c {
        GrowthForm { exponent: c, log_corrected: false }
    } else {
        GrowthForm { exponent: -b, log_corrected: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub label: String,
    pub method: GrowthMethod,
    pub p: LpExponent,
    pub b: f64,
    pub m: usize,
    pub value: f64,
    pub prediction: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub label: String,
    pub method: GrowthMethod,
    pub p: LpExponent,
    pub b: f64,
    pub form: String,
    pub predicted_exponent: f64,
    pub fitted_exponent: f64,
    pub r2: f64,
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub points: Vec<GrowthPoint>,
    pub fits: Vec<GrowthFit>,
}

impl GrowthTable {
    pub fn all_pass(&self) -> bool {
        self.fits.iter().all(|f| f.pass)
    }
}

fn method_for(p: LpExponent) -> GrowthMethod {
    match p {
        LpExponent::Inf => GrowthMethod::Closed,
        LpExponent::Finite(v) if v <= 1.0 => GrowthMethod::Criterion,
        LpExponent::Finite(_) => GrowthMethod::LowerBound,
    }
}

fn label(method: GrowthMethod, p: LpExponent, b: f64, form: &GrowthForm) -> String {
    let what = match method {
        GrowthMethod::Criterion => "criterion",
        GrowthMethod::Closed => "closed form",
        GrowthMethod::LowerBound => "packet lower bound",
    };
    format!("exponential multiplier norm, {what}, p={p}, b={b}: ~{}", form.describe())
}

fn point_value(
    partition: &DyadicPartition,
    cases: &[LowerBoundCase],
    method: GrowthMethod,
    p: LpExponent,
    b: f64,
    m: usize,
) -> Result<f64> {
    let grid = partition.grid();
    let freq = 1i64 << m;
    match method {
        GrowthMethod::Criterion => Ok(verdict(&make_exponential(grid, [freq, 0])?, partition, p, b)?.combined),
        GrowthMethod::Closed => {
            let a = Analysis::new(&make_exponential(grid, [freq, 0])?, partition)?;
            Ok(a.pinf_term2(b)?.value + a.pinf_term3(b).value)
        }
        GrowthMethod::LowerBound => {
            let f = make_exponential(grid, [-freq, 0])?;
            let family = cases
                .iter()
                .map(|&c| make_modulated_packet(&PacketSpec::for_case(grid, m, c, b)))
                .collect::<Result<Vec<_>>>()?;
            let params = BesovParams::new(0.0, b, p, LpExponent::Inf);
            Ok(multiplier_lower_bound(&f, partition, params, &family)?.value)
        }
    }
}

/// Sweep `f = e^{i 2^m x_1}` over `config.b_list × config.p_list × m-range`
/// and fit the growth exponent against the predicted form. For
/// `1 < p < ∞` the value is the packet lower bound with `f = e^{-i 2^m x_1}`.
pub fn run_exp_growth(config: &ExperimentConfig) -> Result<GrowthTable> {
    config.validate()?;
    let cases =
        config.cases.iter().map(|&c| LowerBoundCase::from_number(c)).collect::<Result<Vec<_>>>()?;
    if config.p_list.iter().any(|&p| method_for(p) == GrowthMethod::LowerBound) {
        if cases.is_empty() {
            return Err(Error::Parameter("lower-bound sweep needs packet cases".into()));
        }
        if config.m_range.0 < 3 {
            return Err(Error::Parameter("packets need m >= 3".into()));
        }
    }
    let partition = DyadicPartition::build(config.grid, PartitionKind::Radial);
    let ms = config.ms();
    let mut sweep: Vec<(LpExponent, f64, usize)> = Vec::new();
    for &p in &config.p_list {
        for &b in &config.b_list {
            sweep.extend(ms.iter().map(|&m| (p, b, m)));
        }
    }
    let values = crate::par::map_slice(&sweep, |&(p, b, m)| point_value(&partition, &cases, method_for(p), p, b, m))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let mut points = Vec::with_capacity(sweep.len());
    let mut fits = Vec::new();
    for (chunk, vals) in sweep.chunks(ms.len()).zip(values.chunks(ms.len())) {
        let (p, b, _) = chunk[0];
        let method = method_for(p);
        let form = growth_form(p, b);
        let label = label(method, p, b, &form);
        let mut ratios = Vec::with_capacity(ms.len());
        for (&(_, _, m), &value) in chunk.iter().zip(vals) {
            let prediction = form.predict(m);
            ratios.push(value / prediction);
            points.push(GrowthPoint {
                label: label.clone(),
                method,
                p,
                b,
                m,
                value,
                prediction,
                ratio: value / prediction,
            });
        }
        let xs: Vec<f64> = ms.iter().map(|&m| form.base(m)).collect();
        let fit = fit_slope(&xs, vals)?;
        let spread = ratio_spread(&ratios);
        fits.push(GrowthFit {
            label,
            method,
            p,
            b,
            form: form.describe(),
            predicted_exponent: form.exponent,
            fitted_exponent: fit.slope,
            r2: fit.r2,
            spread,
            pass: (fit.slope - form.exponent).abs() <= EXPONENT_TOLERANCE && spread <= RATIO_SPREAD,
        });
    }
    Ok(GrowthTable { points, fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn forms_by_regime() {
        let one = LpExponent::ONE;
        assert_eq!(growth_form(one, 2.0), GrowthForm { exponent: 2.0, log_corrected: false });
        assert_eq!(growth_form(one, 1.0), GrowthForm { exponent: 1.0, log_corrected: true });
        assert_eq!(growth_form(one, -1.0).exponent, 1.0);
        assert_eq!(growth_form(one, -2.0).exponent, 2.0);
        let four = LpExponent::finite(4.0).unwrap();
        assert_eq!(growth_form(four, 0.0).exponent, 0.5);
        assert_eq!(growth_form(four, 0.5), GrowthForm { exponent: 0.5, log_corrected: true });
        assert_eq!(growth_form(LpExponent::finite(1.5).unwrap(), -1.0).exponent, 1.0);
        assert_eq!(growth_form(one, 1.0).describe(), "(1+m)ln(1+m)");
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let mut c = ExperimentConfig::desk("t");
        c.grid = GridSpec::new(1, 10).unwrap();
        c.m_range = (3, 6);
        c.b_list = vec![2.0];
        let a = run_exp_growth(&c).unwrap();
        assert_eq!(a, run_exp_growth(&c).unwrap());
        assert_eq!(a.points.len(), 8);
        assert_eq!(a.fits.len(), 2);
    }
}
