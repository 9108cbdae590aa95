use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integrability or summability exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Inf,
}

impl LpExponent {
    pub const ONE: LpExponent = LpExponent::Finite(1.0);
    pub const TWO: LpExponent = LpExponent::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(LpExponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(LpExponent::Inf)
        } else {
            Err(Error::Parameter(format!("exponent must lie in (0, inf], got {p}")))
        }
    }

    pub fn is_inf(self) -> bool {
        matches!(self, LpExponent::Inf)
    }

    /// Value as `f64`, with `INF` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            LpExponent::Finite(p) => p,
            LpExponent::Inf => f64::INFINITY,
        }
    }

    /// Hölder conjugate. Exponents at or below 1 map to `INF`.
    pub fn conjugate(self) -> LpExponent {
        match self {
            LpExponent::Inf => LpExponent::ONE,
            LpExponent::Finite(p) if p <= 1.0 => LpExponent::Inf,
            LpExponent::Finite(p) => LpExponent::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p`, zero for `INF`.
    pub fn reciprocal(self) -> f64 {
        match self {
            LpExponent::Inf => 0.0,
            LpExponent::Finite(p) => 1.0 / p,
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Inf => write!(f, "inf"),
        }
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(LpExponent::Inf);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::Parameter(format!("cannot parse exponent '{s}'")))?;
        LpExponent::finite(p)
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LpExponent::Finite(p) => s.serialize_f64(*p),
            LpExponent::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => LpExponent::finite(p).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(LpExponent::ONE.conjugate(), LpExponent::Inf);
        assert_eq!(LpExponent::Inf.conjugate(), LpExponent::ONE);
        assert_eq!(LpExponent::TWO.conjugate(), LpExponent::TWO);
        let p = LpExponent::Finite(4.0);
        let q = p.conjugate().value();
        assert!((1.0 / 4.0 + 1.0 / q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_and_roundtrip() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Inf);
        assert_eq!("1.5".parse::<LpExponent>().unwrap(), LpExponent::Finite(1.5));
        assert!("-1".parse::<LpExponent>().is_err());
        assert!("0".parse::<LpExponent>().is_err());
        let js = serde_json::to_string(&vec![LpExponent::Inf, LpExponent::TWO]).unwrap();
        assert_eq!(js, r#"["inf",2.0]"#);
        let back: Vec<LpExponent> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, vec![LpExponent::Inf, LpExponent::TWO]);
    }
}
