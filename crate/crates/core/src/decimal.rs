use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{MuntzError, Result};
use crate::scalar::Real;

/// A real number kept in its decimal source form so it can be re-read at any
/// working precision without inheriting binary rounding from an earlier one.
///
/// Deserializes from either a JSON string (`"0.1"`) or a JSON number.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Decimal(String);

impl Decimal {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn parse<T: Real>(&self, bits: u32) -> Result<T> {
        T::parse_decimal(&self.0, bits).ok_or_else(|| MuntzError::MalformedNumber(self.0.clone()))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Decimal {
    fn from(s: &str) -> Self {
        Decimal(s.trim().to_string())
    }
}

impl From<String> for Decimal {
    fn from(s: String) -> Self {
        Decimal(s.trim().to_string())
    }
}

impl From<f64> for Decimal {
    fn from(x: f64) -> Self {
        // shortest representation that round-trips the binary value
        Decimal(format!("{x:?}"))
    }
}

impl From<i64> for Decimal {
    fn from(n: i64) -> Self {
        Decimal(n.to_string())
    }
}

impl From<i32> for Decimal {
    fn from(n: i32) -> Self {
        Decimal(n.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Text(s) => Decimal::from(s),
            Raw::Int(n) => Decimal::from(n),
            Raw::Float(x) => Decimal::from(x),
        })
    }
}
