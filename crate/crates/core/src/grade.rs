//! Grades `m = l + i/T` in `(1/T)Z`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{frac, int, parse_fraction, Scalar};

/// A grade `l + i/T` with `0 <= i < T`.
///
/// `l` may be negative for intermediate indices; grades of spaces and levels
/// are always nonnegative.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GradeIndex {
    l: i64,
    i: u32,
    t: u32,
}

impl GradeIndex {
    pub fn new(l: i64, i: u32, t: u32) -> Self {
        assert!(t > 0 && i < t, "grade fraction {i}/{t} out of range");
        Self { l, i, t }
    }

    pub fn zero(t: u32) -> Self {
        Self::new(0, 0, t)
    }

    /// The grade `k/T`.
    pub fn from_units(k: i64, t: u32) -> Self {
        let (l, i) = k.div_mod_floor(&(t as i64));
        Self::new(l, i as u32, t)
    }

    /// Rejects values that are not multiples of `1/T`.
    pub fn from_value(x: &Scalar, t: u32) -> Result<Self> {
        let scaled = x * int(t as i64);
        if !scaled.is_integer() {
            return Err(Error::Parse(format!("{x} is not a multiple of 1/{t}")));
        }
        let k: i64 = scaled
            .to_integer()
            .try_into()
            .map_err(|_| Error::Parse(format!("grade {x} out of range")))?;
        Ok(Self::from_units(k, t))
    }

    /// Accepts `"l+i/T"`, a fraction `"p/q"`, or an integer.
    pub fn parse(s: &str, t: u32) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a grade: {s:?}"));
        if compact.is_empty() {
            return Err(bad());
        }
        let value = match compact[1..].find('+') {
            Some(at) => {
                let (whole, part) = compact.split_at(at + 1);
                let whole: i64 = whole.parse().map_err(|_| bad())?;
                let part = parse_fraction(&part[1..]).map_err(|_| bad())?;
                int(whole) + part
            }
            None => parse_fraction(&compact).map_err(|_| bad())?,
        };
        Self::from_value(&value, t).map_err(|_| bad())
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn order(&self) -> u32 {
        self.t
    }

    /// `T * value`.
    pub fn units(&self) -> i64 {
        self.l * self.t as i64 + self.i as i64
    }

    pub fn value(&self) -> Scalar {
        int(self.l) + frac(self.i as i64, self.t as i64)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.l >= 0
    }

    /// `self + k/T`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_units(self.units() + k, self.t)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.t, other.t);
        self.shift(other.units())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.t, other.t);
        self.shift(-other.units())
    }

    /// All nonnegative grades up to and including `self`, ascending.
    pub fn grades_upto(&self) -> Vec<Self> {
        (0..=self.units())
            .map(|k| Self::from_units(k, self.t))
            .collect()
    }
}

impl Ord for GradeIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.units() * other.t as i64;
        let b = other.units() * self.t as i64;
        a.cmp(&b).then(self.t.cmp(&other.t))
    }
}

impl PartialOrd for GradeIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GradeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t == 1 {
            write!(f, "{}", self.l)
        } else {
            write!(f, "{}+{}/{}", self.l, self.i, self.t)
        }
    }
}

impl fmt::Debug for GradeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GradeIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
struct RawGrade {
    value: String,
    order: u32,
}

impl<'de> Deserialize<'de> for GradeIndex {
    /// Reads `{"value": "1/2", "order": 2}`; a bare string needs the order
    /// from context and goes through [`GradeIndex::parse`] instead.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGrade::deserialize(d)?;
        GradeIndex::parse(&raw.value, raw.order).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!(
            GradeIndex::parse("1+1/2", 2).unwrap(),
            GradeIndex::new(1, 1, 2)
        );
        assert_eq!(
            GradeIndex::parse("3/2", 2).unwrap(),
            GradeIndex::new(1, 1, 2)
        );
        assert_eq!(GradeIndex::parse("0", 2).unwrap(), GradeIndex::zero(2));
        assert_eq!(GradeIndex::parse("2", 1).unwrap(), GradeIndex::new(2, 0, 1));
        assert_eq!(
            GradeIndex::parse("-1/2", 2).unwrap(),
            GradeIndex::new(-1, 1, 2)
        );
        assert!(GradeIndex::parse("x/2", 2).is_err());
        assert!(GradeIndex::parse("1/3", 2).is_err());
        assert!(GradeIndex::parse("", 2).is_err());
    }

    #[test]
    fn arithmetic_and_order() {
        let half = GradeIndex::new(0, 1, 2);
        assert_eq!(half.shift(1), GradeIndex::new(1, 0, 2));
        assert_eq!(half.shift(-2), GradeIndex::new(-1, 1, 2));
        assert_eq!(half.value(), frac(1, 2));
        assert!(half < GradeIndex::new(1, 0, 2));
        assert_eq!(half.to_string(), "0+1/2");
        assert_eq!(GradeIndex::new(1, 1, 2).grades_upto().len(), 4);
        let round = GradeIndex::parse(&GradeIndex::new(2, 1, 2).to_string(), 2).unwrap();
        assert_eq!(round, GradeIndex::new(2, 1, 2));
    }
}
