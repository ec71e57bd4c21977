//! Reals extended by `+∞`, with an explicit infinite variant.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `ℝ ∪ {∞}`.
///
/// Serialized as a JSON number when finite and as the string `"inf"` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub const ZERO: Extended = Extended::Finite(0.0);

    /// Maps `+∞` floats onto [`Extended::Infinite`]; everything else stays finite.
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::Infinite
        } else {
            Extended::Finite(v)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// Lossy conversion for arithmetic that is allowed to saturate.
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        Extended::from_f64(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("∞"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = Extended;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Extended, E> {
                Ok(Extended::from_f64(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Extended, E> {
                Ok(Extended::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Extended, E> {
                match v {
                    "inf" | "infinity" | "∞" => Ok(Extended::Infinite),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(Extended::Finite(1e300) < Extended::Infinite);
        assert!(Extended::Finite(1.0) < Extended::Finite(2.0));
    }

    #[test]
    fn json_forms() {
        assert_eq!(serde_json::to_string(&Extended::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Extended::Finite(2.5)).unwrap(), "2.5");
        let v: Extended = serde_json::from_str("3").unwrap();
        assert_eq!(v, Extended::Finite(3.0));
        let v: Extended = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, Extended::Infinite);
        assert!(serde_json::from_str::<Extended>("\"nan\"").is_err());
    }
}
