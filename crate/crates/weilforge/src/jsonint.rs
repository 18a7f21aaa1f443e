//! Arbitrary-precision integers in JSON: magnitudes up to `2^53 - 1`
//! serialize as plain JSON numbers, anything larger as a decimal string,
//! so no consumer ever sees a rounded value. Deserialization accepts both
//! encodings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct JInt(pub BigInt);

const SAFE_MAX: i64 = (1i64 << 53) - 1;

impl From<BigInt> for JInt {
    fn from(v: BigInt) -> JInt {
        JInt(v)
    }
}

impl Serialize for JInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if let Some(v) = self.0.to_i64() {
            if (-SAFE_MAX..=SAFE_MAX).contains(&v) {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&self.0.to_string())
    }
}

struct JIntVisitor;

impl Visitor<'_> for JIntVisitor {
    type Value = JInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<JInt, E> {
        Ok(JInt(BigInt::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<JInt, E> {
        Ok(JInt(BigInt::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<JInt, E> {
        BigInt::from_str(v)
            .map(JInt)
            .map_err(|_| E::custom(format!("not a decimal integer: {v:?}")))
    }
}

impl<'de> Deserialize<'de> for JInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<JInt, D::Error> {
        d.deserialize_any(JIntVisitor)
    }
}
