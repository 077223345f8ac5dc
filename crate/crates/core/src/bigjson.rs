//! Arbitrary-precision integers as plain JSON numbers (never strings).

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

pub fn to_number(n: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&n.to_string()).expect("integers are valid JSON numbers")
}

pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    to_number(n).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let num = serde_json::Number::deserialize(d)?;
    BigInt::from_str(&num.to_string()).map_err(|_| D::Error::custom(format!("not an integer: {num}")))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let nums: Vec<serde_json::Number> = v.iter().map(to_number).collect();
        nums.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let nums = Vec::<serde_json::Number>::deserialize(d)?;
        nums.iter()
            .map(|n| BigInt::from_str(&n.to_string()).map_err(|_| D::Error::custom(format!("not an integer: {n}"))))
            .collect()
    }
}
