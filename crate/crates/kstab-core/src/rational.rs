//! Exact rational scalars: aliases, parsing and display in `p/q` form.

use crate::error::{KstabError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Ratio = BigRational;

/// `p/q` as an exact rational. Panics on `q == 0`; use for literals only.
pub fn rat(p: i64, q: i64) -> Ratio {
    Ratio::new(Int::from(p), Int::from(q))
}

pub fn rat_int(p: i64) -> Ratio {
    Ratio::from_integer(Int::from(p))
}

/// Parses `"p/q"`, `"p"`, or a JSON integer into an exact rational.
pub fn parse_ratio(value: &serde_json::Value) -> Result<Ratio> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat_int(i))
            } else {
                Err(KstabError::NonRational(format!(
                    "non-integer numeric literal {n}; write rationals as \"p/q\" strings"
                )))
            }
        }
        serde_json::Value::String(s) => parse_ratio_str(s),
        other => Err(KstabError::NonRational(format!(
            "expected integer or \"p/q\" string, got {other}"
        ))),
    }
}

pub fn parse_ratio_str(s: &str) -> Result<Ratio> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: Int = num
        .parse()
        .map_err(|_| KstabError::NonRational(format!("bad numerator in {s:?}")))?;
    let q: Int = den
        .parse()
        .map_err(|_| KstabError::NonRational(format!("bad denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(KstabError::NonRational(format!("zero denominator in {s:?}")));
    }
    Ok(Ratio::new(p, q))
}

/// Canonical `p/q` rendering (integers render without the `/q` part).
pub fn format_ratio(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Ceiling of a rational as a big integer.
pub fn ceil_int(r: &Ratio) -> Int {
    r.ceil().to_integer()
}

/// Floor of a rational as a big integer.
pub fn floor_int(r: &Ratio) -> Int {
    r.floor().to_integer()
}

pub fn abs(r: &Ratio) -> Ratio {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

/// Serde adapter serializing a `Ratio` as its `p/q` string.
pub mod serde_ratio {
    use super::*;
    use serde::{self, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Ratio, D::Error> {
        let s = String::deserialize(de)?;
        parse_ratio_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Ratio>`.
pub mod serde_ratio_vec {
    use super::*;
    use serde::{self, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Ratio], ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_ratio(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Ratio>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .iter()
            .map(|s| parse_ratio_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
