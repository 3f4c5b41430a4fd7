use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Currency amount stored as integral cents.
///
/// Rendered without a unit symbol and without trailing zero cents, so
/// `Money::from_dollars(240)` displays as `240` and 1069.5 as `1069.50`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid currency amount {0:?}")]
pub struct MoneyParseError(pub String);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub const fn from_dollars(dollars: i64) -> Self {
        Money(dollars * 100)
    }

    pub const fn cents(self) -> i64 {
        self.0
    }

    /// Whole currency units, rounded toward negative infinity.
    pub fn whole_units(self) -> i64 {
        self.0.div_euclid(100)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Amount with thousands separators and a dollar sign, e.g. `$1,100`.
    pub fn to_dollar_string(self) -> String {
        let units = self.whole_units().to_string();
        let mut grouped = String::new();
        for (i, ch) in units.chars().enumerate() {
            if i > 0 && (units.len() - i).is_multiple_of(3) && ch != '-' {
                grouped.push(',');
            }
            grouped.push(ch);
        }
        let cents = self.0.rem_euclid(100);
        if cents == 0 {
            format!("${grouped}")
        } else {
            format!("${grouped}.{cents:02}")
        }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let (units, cents) = (abs / 100, abs % 100);
        if cents == 0 {
            write!(f, "{sign}{units}")
        } else {
            write!(f, "{sign}{units}.{cents:02}")
        }
    }
}

impl FromStr for Money {
    type Err = MoneyParseError;

    /// Accepts `240`, `1069.0`, `27.5`, `$1,100` and `1,100.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MoneyParseError(s.to_string());
        let cleaned: String = s
            .trim()
            .trim_start_matches('$')
            .chars()
            .filter(|c| *c != ',')
            .collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        let (negative, body) = match cleaned.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, cleaned.as_str()),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let units: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        // round half up on the third fractional digit
        let mut digits = frac_part.bytes().map(|b| i64::from(b - b'0'));
        let d1 = digits.next().unwrap_or(0);
        let d2 = digits.next().unwrap_or(0);
        let d3 = digits.next().unwrap_or(0);
        let mut cents = units
            .checked_mul(100)
            .and_then(|c| c.checked_add(d1 * 10 + d2))
            .ok_or_else(err)?;
        if d3 >= 5 {
            cents += 1;
        }
        Ok(Money(if negative { -cents } else { cents }))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0 % 100 == 0 {
            serializer.serialize_i64(self.0 / 100)
        } else {
            serializer.serialize_f64(self.0 as f64 / 100.0)
        }
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(Money::from_dollars(v)),
            Raw::Float(v) => format!("{v}").parse().map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dump_forms() {
        assert_eq!("240".parse::<Money>().unwrap(), Money::from_dollars(240));
        assert_eq!("1069.0".parse::<Money>().unwrap(), Money::from_dollars(1069));
        assert_eq!("$1,100".parse::<Money>().unwrap(), Money::from_dollars(1100));
        assert_eq!("27.5".parse::<Money>().unwrap(), Money::from_cents(2750));
        assert_eq!("0.125".parse::<Money>().unwrap(), Money::from_cents(13));
        assert!("abc".parse::<Money>().is_err());
        assert!("".parse::<Money>().is_err());
        assert!("1.2.3".parse::<Money>().is_err());
    }

    #[test]
    fn renders_without_unit() {
        assert_eq!(Money::from_dollars(240).to_string(), "240");
        assert_eq!(Money::from_cents(106950).to_string(), "1069.50");
        assert_eq!(Money::from_dollars(1100).to_dollar_string(), "$1,100");
        assert_eq!(Money::from_dollars(100).to_dollar_string(), "$100");
        assert_eq!(Money::from_dollars(1_234_567).to_dollar_string(), "$1,234,567");
    }

    #[test]
    fn serde_round_trip() {
        let m = Money::from_cents(2750);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "27.5");
        assert_eq!(serde_json::from_str::<Money>(&text).unwrap(), m);
        assert_eq!(serde_json::from_str::<Money>("3200").unwrap(), Money::from_dollars(3200));
    }
}
