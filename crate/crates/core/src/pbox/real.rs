use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point on the extended real line: a finite value or one of `±∞`.
///
/// NaN is not representable, which makes the ordering total.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const NEG_INF: Self = ExtendedReal(f64::NEG_INFINITY);
    pub const POS_INF: Self = ExtendedReal(f64::INFINITY);
    pub const ZERO: Self = ExtendedReal(0.0);

    /// Wraps `value`, rejecting NaN.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            Err(Error::NonFinite)
        } else {
            Ok(ExtendedReal(value))
        }
    }

    /// Wraps a value that must be finite.
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(ExtendedReal(value))
        } else {
            Err(Error::NonFinite)
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    #[inline]
    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Internal constructor for values already known not to be NaN.
    #[inline]
    pub(crate) fn from_f64_unchecked(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        ExtendedReal(value)
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded at construction, so partial_cmp never fails.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl From<ExtendedReal> for f64 {
    fn from(x: ExtendedReal) -> f64 {
        x.0
    }
}

impl TryFrom<f64> for ExtendedReal {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        ExtendedReal::new(value)
    }
}

impl fmt::Debug for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Infinities print as `inf` / `-inf`; finite values use the shortest
/// representation that round-trips.
impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.pad("inf")
        } else if self.is_neg_inf() {
            f.pad("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(Self::POS_INF),
            "-inf" | "-infinity" => return Ok(Self::NEG_INF),
            _ => {}
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
        ExtendedReal::new(v)
    }
}

// Finite values serialize as JSON numbers, infinities as the tokens "inf" / "-inf".
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            serializer.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                ExtendedReal::new(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Ok(ExtendedReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(ExtendedReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}

/// The closed interval `[lo, hi]` that is assumed to contain every observation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingInterval {
    lo: ExtendedReal,
    hi: ExtendedReal,
}

impl BoundingInterval {
    pub fn new(lo: ExtendedReal, hi: ExtendedReal) -> Result<Self> {
        if lo < hi {
            Ok(BoundingInterval { lo, hi })
        } else {
            Err(Error::BadInterval { a: lo, b: hi })
        }
    }

    /// Convenience constructor from raw floats (`f64::INFINITY` allowed).
    pub fn from_f64(lo: f64, hi: f64) -> Result<Self> {
        Self::new(ExtendedReal::new(lo)?, ExtendedReal::new(hi)?)
    }

    #[inline]
    pub fn lo(&self) -> ExtendedReal {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> ExtendedReal {
        self.hi
    }

    pub fn contains(&self, x: ExtendedReal) -> bool {
        self.lo <= x && x <= self.hi
    }
}
