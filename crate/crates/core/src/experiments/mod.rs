//! Batch experiments: growth sweeps for exponentials, characteristic
//! functions, and upper/lower bound sandwiches. Every run is deterministic
//! given its [`ExperimentConfig`]; rows are emitted in sweep order.

mod charfun;
mod growth;
mod sandwich;

pub use charfun::{run_charfun, CharfunRow, CharfunSummary, CharfunTable};
pub use growth::{growth_form, run_exp_growth, GrowthFit, GrowthForm, GrowthMethod, GrowthPoint, GrowthTable};
pub use sandwich::{run_sandwich, SandwichFit, SandwichRow, SandwichTable};

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::LpExponent;
use crate::gallery::IndicatorShape;
use crate::grid::GridSpec;

/// Fitted exponents may differ from the prediction by this much.
pub const EXPONENT_TOLERANCE: f64 = 0.15;
/// Largest accepted `max/min` of value over prediction across a sweep.
pub const RATIO_SPREAD: f64 = 3.0;

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<Fit> {
    if xs.len() != ys.len() {
        return Err(Error::Parameter(format!("{} abscissae for {} values", xs.len(), ys.len())));
    }
    if xs.len() < 4 {
        return Err(Error::Parameter(format!("need at least 4 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::RejectedInput("non-finite sample".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(Fit { slope, intercept: my - slope * mx, r2 })
}

/// Least squares on `(ln x, ln y)`: the exponent of a power law.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<Fit> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::RejectedInput("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// `max r / min r` of a positive sequence.
pub fn ratio_spread(ratios: &[f64]) -> f64 {
    let hi = ratios.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let lo = ratios.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::Parameter(format!("unknown table format '{s}'"))),
        }
    }
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

/// Serialize rows as CSV (header from the field names) or a JSON array.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: TableFormat, mut out: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Write rows to `dir/stem.{csv,json}`, creating `dir` if needed.
pub fn save_rows<T: Serialize>(dir: &Path, stem: &str, rows: &[T], format: TableFormat) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    write_rows(rows, format, file)?;
    Ok(path)
}

/// Parameters of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSpec,
    pub b_list: Vec<f64>,
    pub p_list: Vec<LpExponent>,
    /// Inclusive range of dyadic frequency exponents `m`.
    pub m_range: (usize, usize),
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Packet cases used by lower-bound sweeps.
    pub cases: Vec<u8>,
    pub shapes: Vec<IndicatorShape>,
}

impl ExperimentConfig {
    /// Desk-scale defaults: 1D `J = 14`, `m ∈ [3, 10]`.
    pub fn desk(name: &str) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            grid: GridSpec::new(1, 14).expect("valid grid"),
            b_list: vec![-2.0, -1.0, 0.0, 0.5, 1.0, 2.0],
            p_list: vec![LpExponent::ONE, LpExponent::Inf],
            m_range: (3, 10),
            seed: 0,
            out: None,
            cases: vec![1, 2, 3, 5],
            shapes: vec![IndicatorShape::Cube],
        }
    }

    /// 2D desk scale, `J = 10`.
    pub fn desk_2d(name: &str) -> Self {
        let mut c = ExperimentConfig::desk(name);
        c.grid = GridSpec::new(2, 10).expect("valid grid");
        c.m_range = (3, c.grid.k_max() - 2);
        c
    }

    pub fn ms(&self) -> Vec<usize> {
        (self.m_range.0..=self.m_range.1).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.m_range;
        let max = self.grid.k_max().saturating_sub(2);
        if lo < 2 || hi > max || lo > hi {
            return Err(Error::Parameter(format!("m-range [{lo}, {hi}] must lie within [2, {max}]")));
        }
        if self.b_list.is_empty() || self.p_list.is_empty() {
            return Err(Error::Parameter("empty parameter sweep".into()));
        }
        if self.b_list.iter().any(|b| !b.is_finite()) {
            return Err(Error::Parameter("non-finite b".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_constant_fits() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let f = fit_slope(&xs, &xs).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14 && (f.r2 - 1.0).abs() < 1e-14);
        let c = fit_slope(&xs, &[3.0; 5]).unwrap();
        assert!(c.slope.abs() < 1e-14);
        assert!(fit_slope(&xs[..3], &xs[..3]).is_err());
        assert!(matches!(fit_slope(&xs, &[1.0, 0.0, 1.0, 1.0, 1.0]), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn noisy_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))).collect();
        let f = fit_slope(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 0.05, "{}", f.slope);
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::desk("t");
        c.validate().unwrap();
        c.m_range = (3, 11);
        assert!(c.validate().is_err());
        assert_eq!(ExperimentConfig::desk_2d("t").m_range, (3, 6));
    }

    #[test]
    fn csv_layout() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            p: LpExponent,
        }
        let mut buf = Vec::new();
        write_rows(&[R { a: 0.5, p: LpExponent::Inf }, R { a: 2.0, p: LpExponent::ONE }], TableFormat::Csv, &mut buf)
            .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,p\n0.5,inf\n2.0,1.0\n");
    }
}
