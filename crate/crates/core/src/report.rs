//! Serialization helpers shared by the report types: exact rationals travel
//! as "p/q" strings, unbounded integers as decimal strings, and CSV floats
//! are rendered at a fixed 15 significant digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::str::FromStr;

use crate::error::{Error, Result};

pub fn ratio_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_from_string(s: &str) -> Result<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = BigInt::from_str(num.trim())
        .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
    let denom = match den {
        Some(d) => BigInt::from_str(d.trim())
            .map_err(|_| Error::Parse(format!("bad rational denominator {d:?}")))?,
        None => BigInt::one(),
    };
    if denom == BigInt::from(0) {
        return Err(Error::Parse("rational denominator is zero".into()));
    }
    Ok(BigRational::new(numer, denom))
}

/// Fixed 15-significant-digit float rendering for CSV cells.
pub fn f64_csv(v: f64) -> String {
    format!("{v:.14e}")
}

/// RFC 4180 field quoting: only when the content requires it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// serde adapter: BigRational <-> "p/q".
pub mod ratio_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&ratio_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(de)?;
        ratio_from_string(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter: `Vec<BigRational>` <-> ["p/q", ...].
pub mod ratio_vec_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[BigRational],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(ratio_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        let items = Vec::<String>::deserialize(de)?;
        items
            .iter()
            .map(|s| ratio_from_string(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// serde adapter: `Vec<BigInt>` <-> ["v", ...].
pub mod bigint_vec_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|b| b.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<BigInt>, D::Error> {
        let items = Vec::<String>::deserialize(de)?;
        items
            .iter()
            .map(|s| BigInt::from_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// serde adapter: `Vec<u128>` <-> ["v", ...] (decimal strings keep JSON readers
/// that truncate large numbers out of trouble).
pub mod u128_vec_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u128], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|b| b.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<u128>, D::Error> {
        let items = Vec::<String>::deserialize(de)?;
        items
            .iter()
            .map(|s| s.parse::<u128>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// serde adapter: BigUint <-> decimal string.
pub mod biguint_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }
}
