//! Serde helpers for wire formats.

/// Big integers as decimal strings; `b` and `q` exceed 64 bits routinely.
pub mod biguint_dec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::from_str(&text)
            .map_err(|e| serde::de::Error::custom(format!("bad decimal integer {text:?}: {e}")))
    }
}
