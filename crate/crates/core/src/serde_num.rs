//! Serde helpers for reals that may be `+inf`.
//!
//! JSON has no infinity literal; `+inf` is written as the string `"inf"`
//! and read back from either that string or a plain number.

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};
use std::fmt;

pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_infinite() && *value > 0.0 {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_f64(*value)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
    struct ExtendedReal;

    impl Visitor<'_> for ExtendedReal {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or the string \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    deserializer.deserialize_any(ExtendedReal)
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Wrapped {
        #[serde(with = "super")]
        v: f64,
    }

    #[test]
    fn infinity_round_trips_as_string() {
        let json = serde_json::to_string(&Wrapped { v: f64::INFINITY }).unwrap();
        assert_eq!(json, r#"{"v":"inf"}"#);
        let back: Wrapped = serde_json::from_str(&json).unwrap();
        assert!(back.v.is_infinite());
        let back: Wrapped = serde_json::from_str(r#"{"v":3}"#).unwrap();
        assert_eq!(back.v, 3.0);
        assert!(serde_json::from_str::<Wrapped>(r#"{"v":"nan"}"#).is_err());
    }
}
