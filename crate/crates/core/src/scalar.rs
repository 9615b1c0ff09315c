//! Exact rational scalars and the handful of combinatorial helpers built on them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Generalized binomial coefficient `alpha (alpha - 1) ... (alpha - j + 1) / j!`.
pub fn rbinom(alpha: &Scalar, j: u32) -> Scalar {
    let mut acc = Scalar::one();
    let mut top = alpha.clone();
    for k in 1..=j {
        if top.is_zero() {
            return Scalar::zero();
        }
        acc = acc * &top / int(k as i64);
        top -= Scalar::one();
    }
    acc
}

/// Integer-argument binomial, with the generalized convention for negative `n`.
pub fn ibinom(n: i64, j: u32) -> Scalar {
    rbinom(&int(n), j)
}

pub fn factorial(j: u32) -> Scalar {
    (1..=j as i64).fold(Scalar::one(), |acc, k| acc * int(k))
}

pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Returns the value as an `i64` if it is an integer that fits.
pub fn as_integer(x: &Scalar) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Serializes as `"p/q"`, always with an explicit denominator.
pub fn to_fraction_string(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, `"p"`, or `"-p/q"`.
pub fn parse_fraction(s: &str) -> Result<Scalar, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact fraction: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Serde adapter writing scalars as `"p/q"` strings.
pub mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_fraction(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for scalar matrices (`Vec<Vec<Scalar>>`).
pub mod serde_matrix {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(to_fraction_string).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|x| parse_fraction(x).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rbinom_examples() {
        assert_eq!(rbinom(&frac(7, 3), 0), int(1));
        assert_eq!(rbinom(&frac(1, 2), 2), frac(-1, 8));
        assert_eq!(rbinom(&int(3), 5), int(0));
        assert_eq!(ibinom(-1, 3), int(-1));
        assert_eq!(ibinom(-3, 2), int(6));
        assert_eq!(ibinom(5, 2), int(10));
    }

    #[test]
    fn fraction_strings() {
        assert_eq!(to_fraction_string(&frac(-2, 4)), "-1/2");
        assert_eq!(to_fraction_string(&int(3)), "3/1");
        assert_eq!(parse_fraction("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_fraction("-5").unwrap(), int(-5));
        assert!(parse_fraction("x/2").is_err());
        assert!(parse_fraction("1/0").is_err());
    }
}
