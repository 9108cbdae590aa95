//! Textual gallery specs: `name:key=value,key=value,flag`.
//!
//! ```text
//! exp:m=8[,neg]          e^{±i 2^m x_1}
//! exp:k=5                e^{i 5 x_1}
//! const[:c=2]            constant
//! indicator:cube|halfspace
//! mollified:width=0.0625 mollified cube indicator
//! bump:level=4[,corner=0]
//! lacunary:k=10,b=3      Σ_{l≤k} (1+l)^{-b} e^{i 2^l x_1}
//! packet:m=8,case=1,b=0  modulated packet
//! random:band=20[,decay=1][,seed=0]
//! file:path.sfn
//! ```

use std::collections::BTreeMap;

use logbesov::gallery::{
    make_bump, make_exp_stack, make_exponential, make_indicator, make_modulated_packet, mollify, random_band_limited,
    BumpSpec, IndicatorShape, LowerBoundCase, PacketSpec,
};
use logbesov::{GridSpec, SampledFunction};
use num_complex::Complex64;

use crate::CliError;

pub struct Spec {
    pub name: String,
    args: BTreeMap<String, String>,
}

impl Spec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut args = BTreeMap::new();
        for part in rest.split(',').filter(|s| !s.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => args.insert(k.trim().to_string(), v.trim().to_string()),
                None => args.insert(part.trim().to_string(), String::new()),
            };
        }
        Ok(Spec { name: name.trim().to_string(), args })
    }

    pub fn flag(&self, key: &str) -> bool {
        self.args.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.args.get(key).map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.args
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::Spec(format!("bad value '{v}' for '{key}' in '{}'", self.name))))
            .transpose()
    }

    pub fn need<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Spec(format!("'{}' needs '{key}='", self.name)))
    }

    /// Dyadic exponent `m` when the spec is an exponential `exp:m=…`.
    pub fn dyadic_level(&self) -> Option<usize> {
        self.get("m").ok().flatten()
    }
}

/// Parse `a-b` or `a..b` (inclusive) or a single integer.
pub fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Spec(format!("bad range '{text}'"));
    let (a, b) = text.split_once("..").or_else(|| text.split_once('-')).unwrap_or((text, text));
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn build(spec: &Spec, grid: GridSpec) -> Result<SampledFunction, CliError> {
    Ok(match spec.name.as_str() {
        "exp" => {
            let k: i64 = match spec.get::<u32>("m")? {
                Some(m) => 1i64 << m,
                None => spec.need("k")?,
            };
            let k = if spec.flag("neg") { -k } else { k };
            make_exponential(grid, [k, 0])?
        }
        "const" => SampledFunction::constant(grid, Complex64::new(spec.get("c")?.unwrap_or(1.0), 0.0)),
        "indicator" => make_indicator(grid, shape(spec)?)?,
        "mollified" => mollify(&make_indicator(grid, shape(spec)?)?, spec.get("width")?.unwrap_or(1.0 / 16.0)),
        "bump" => make_bump(grid, BumpSpec::on_cube(spec.need("level")?, [spec.get("corner")?.unwrap_or(0), 0]))?,
        "lacunary" => make_exp_stack(grid, spec.need("k")?, spec.get("b")?.unwrap_or(0.0), 0.0)?,
        "packet" => {
            let case = LowerBoundCase::from_number(spec.need("case")?)?;
            make_modulated_packet(&PacketSpec::for_case(grid, spec.need("m")?, case, spec.get("b")?.unwrap_or(0.0)))?
        }
        "random" => random_band_limited(
            grid,
            spec.need("band")?,
            spec.get("decay")?.unwrap_or(1.0),
            spec.get("seed")?.unwrap_or(0),
        )?,
        "file" => {
            let path = spec.args.keys().next().ok_or_else(|| CliError::Spec("file: needs a path".into()))?;
            let f = logbesov::io::read_sfn(path)?;
            if f.grid() != grid {
                return Err(logbesov::Error::GridMismatch.into());
            }
            f
        }
        other => return Err(CliError::Spec(format!("unknown gallery function '{other}'"))),
    })
}

fn shape(spec: &Spec) -> Result<IndicatorShape, CliError> {
    if spec.flag("halfspace") {
        Ok(IndicatorShape::HalfSpace)
    } else if spec.flag("cube") || spec.args.is_empty() || spec.flag("width") {
        Ok(IndicatorShape::Cube)
    } else {
        Err(CliError::Spec("indicator shape must be 'cube' or 'halfspace'".into()))
    }
}
