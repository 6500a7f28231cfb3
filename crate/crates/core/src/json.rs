//! Serde helpers for exact numbers.
//!
//! Big integers are written as plain JSON numbers with every digit kept
//! (`serde_json` is built with `arbitrary_precision`). Rationals are written as
//! `{"num": int, "den": int}` with a positive, reduced denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub mod big_int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = v.to_string().parse().map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        n.to_string().parse().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RatioRepr {
    #[serde(with = "big_int")]
    num: BigInt,
    #[serde(with = "big_int")]
    den: BigInt,
}

pub mod ratio {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RatioRepr {
            num: v.numer().clone(),
            den: v.denom().clone(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let r = RatioRepr::deserialize(d)?;
        if r.den.is_positive() {
            Ok(BigRational::new(r.num, r.den))
        } else {
            Err(D::Error::custom("rational denominator must be positive"))
        }
    }
}

pub mod opt_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => super::ratio::serialize(r, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let r: Option<RatioRepr> = Option::deserialize(d)?;
        match r {
            Some(r) if r.den.is_positive() => Ok(Some(BigRational::new(r.num, r.den))),
            Some(_) => Err(D::Error::custom("rational denominator must be positive")),
            None => Ok(None),
        }
    }
}

/// `num/den` text form used by table output; integers print without a denominator.
pub fn ratio_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
