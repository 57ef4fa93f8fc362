//! Exact virtual time.
//!
//! All durations are kept as rational milliseconds so that sums, differences
//! and averages never drift. Work costs are written as decimal literals, so
//! every measured value has a terminating decimal expansion; averages over
//! sample groups may not, which is why the representation is a fraction.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Most decimal places accepted in a literal.
pub const MAX_DECIMAL_PLACES: usize = 9;

/// A duration (or time coefficient) in milliseconds, exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Millis(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid millisecond literal `{0}`")]
pub struct ParseMillisError(pub String);

impl Millis {
    pub const ZERO: Millis = Millis(Ratio::new_raw(0, 1));

    pub fn from_integer(ms: i64) -> Self {
        Millis(Ratio::from_integer(ms as i128))
    }

    pub fn from_ratio(numer: i128, denom: i128) -> Self {
        Millis(Ratio::new(numer, denom))
    }

    pub fn from_seconds(s: i64) -> Self {
        Self::from_integer(s * 1000)
    }

    /// Rounds a float to the nearest nanosecond. Only used for wall-clock
    /// readings and learned (floating point) coefficients.
    pub fn from_f64_nanos(ms: f64) -> Self {
        let nanos = (ms * 1e6).round() as i128;
        Millis(Ratio::new(nanos, 1_000_000))
    }

    pub fn ratio(&self) -> Ratio<i128> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Millis(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_seconds(&self) -> Millis {
        Millis(self.0 / 1000)
    }

    /// `Some(digits)` when the value is a terminating decimal.
    fn terminating_decimal(&self) -> Option<String> {
        let mut denom = *self.0.denom();
        let mut places = 0usize;
        while denom % 10 == 0 {
            denom /= 10;
            places += 1;
        }
        let mut scale_2 = 0usize;
        while denom % 2 == 0 {
            denom /= 2;
            scale_2 += 1;
        }
        let mut scale_5 = 0usize;
        while denom % 5 == 0 {
            denom /= 5;
            scale_5 += 1;
        }
        if denom != 1 {
            return None;
        }
        places += scale_2.max(scale_5);
        let scaled = self.0 * Ratio::from_integer(10i128.pow(places as u32));
        debug_assert!(scaled.is_integer());
        let n = scaled.to_integer();
        let neg = n < 0;
        let digits = n.unsigned_abs().to_string();
        let text = if places == 0 {
            digits
        } else {
            let padded = format!("{:0>width$}", digits, width = places + 1);
            let (int, frac) = padded.split_at(padded.len() - places);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        };
        Some(if neg { format!("-{text}") } else { text })
    }
}

impl fmt::Display for Millis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terminating_decimal() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}

impl FromStr for Millis {
    type Err = ParseMillisError;

    /// Accepts `123`, `-4.5`, `0.125` and `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMillisError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| err())?;
            let d: i128 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Millis(Ratio::new(n, d)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > MAX_DECIMAL_PLACES || int.len() > 24 {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        let n: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| err())? };
        let r = Ratio::new(n, 10i128.pow(frac.len() as u32));
        Ok(Millis(if neg { -r } else { r }))
    }
}

impl Add for Millis {
    type Output = Millis;
    fn add(self, rhs: Millis) -> Millis {
        Millis(self.0 + rhs.0)
    }
}

impl AddAssign for Millis {
    fn add_assign(&mut self, rhs: Millis) {
        self.0 += rhs.0;
    }
}

impl Sub for Millis {
    type Output = Millis;
    fn sub(self, rhs: Millis) -> Millis {
        Millis(self.0 - rhs.0)
    }
}

impl SubAssign for Millis {
    fn sub_assign(&mut self, rhs: Millis) {
        self.0 -= rhs.0;
    }
}

impl Neg for Millis {
    type Output = Millis;
    fn neg(self) -> Millis {
        Millis(-self.0)
    }
}

impl Mul<i64> for Millis {
    type Output = Millis;
    fn mul(self, rhs: i64) -> Millis {
        Millis(self.0 * rhs as i128)
    }
}

impl Div<i64> for Millis {
    type Output = Millis;
    fn div(self, rhs: i64) -> Millis {
        Millis(self.0 / rhs as i128)
    }
}

impl Sum for Millis {
    fn sum<I: Iterator<Item = Millis>>(iter: I) -> Millis {
        iter.fold(Millis::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Millis> for Millis {
    fn sum<I: Iterator<Item = &'a Millis>>(iter: I) -> Millis {
        iter.fold(Millis::ZERO, |a, b| a + *b)
    }
}

// Integral and terminating values serialize as JSON numbers; anything else
// (averages over three samples, say) as an exact "p/q" string.
impl Serialize for Millis {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(i) = self.0.to_integer().to_i64() {
                return serializer.serialize_i64(i);
            }
        }
        match self.terminating_decimal() {
            Some(s) if s.len() <= 15 => serializer.serialize_f64(s.parse::<f64>().unwrap_or(f64::NAN)),
            _ => serializer.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom())),
        }
    }
}

impl<'de> Deserialize<'de> for Millis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MillisVisitor;

        impl Visitor<'_> for MillisVisitor {
            type Value = Millis;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number of milliseconds or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Millis, E> {
                Ok(Millis::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Millis, E> {
                Ok(Millis(Ratio::from_integer(v as i128)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Millis, E> {
                // Shortest round-trip rendering recovers the decimal literal.
                format!("{v}").parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Millis, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(MillisVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        let a: Millis = "0.1".parse().unwrap();
        let b: Millis = "0.2".parse().unwrap();
        assert_eq!(a + b, "0.3".parse().unwrap());
        assert_eq!("4000".parse::<Millis>().unwrap(), Millis::from_integer(4000));
        assert_eq!("1.0".parse::<Millis>().unwrap(), Millis::from_integer(1));
        assert_eq!(".5".parse::<Millis>().unwrap(), Millis::from_ratio(1, 2));
        assert!("1e3".parse::<Millis>().is_err());
        assert!("".parse::<Millis>().is_err());
        assert!("0.0000000001".parse::<Millis>().is_err());
    }

    #[test]
    fn display_is_minimal_decimal() {
        assert_eq!(Millis::from_integer(3100).to_string(), "3100");
        assert_eq!(Millis::from_ratio(31, 10).to_string(), "3.1");
        assert_eq!(Millis::from_ratio(-1, 8).to_string(), "-0.125");
        assert_eq!(Millis::from_ratio(1, 100).to_string(), "0.01");
        assert_eq!(Millis::from_integer(3100).to_seconds().to_string(), "3.1");
    }

    #[test]
    fn json_round_trip_keeps_exact_values() {
        for m in
            [Millis::from_integer(3000), Millis::from_ratio(1, 10), Millis::from_ratio(1, 3), Millis::from_ratio(-7, 4)]
        {
            let s = serde_json::to_string(&m).unwrap();
            let back: Millis = serde_json::from_str(&s).unwrap();
            assert_eq!(back, m, "{s}");
        }
        assert_eq!(serde_json::to_string(&Millis::from_integer(3000)).unwrap(), "3000");
    }
}
