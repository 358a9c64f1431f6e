//! Exact rational coefficients and their `p/q` string form.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

/// Coefficient type used throughout: arbitrary-precision rationals.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational in reduced `p/q` form (`p` alone when `q = 1`).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` with optional sign; rejects zero denominators.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

pub fn abs(r: &Rat) -> Rat {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

/// Serde adapter serializing rationals as exact `p/q` strings.
pub mod rat_string {
    use super::{format_rat, parse_rat, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_reduced_form() {
        let r = ratio(-6, 4);
        assert_eq!(format_rat(&r), "-3/2");
        assert_eq!(parse_rat("-3/2").unwrap(), r);
        assert_eq!(format_rat(&rat(7)), "7");
        assert_eq!(parse_rat("7").unwrap(), rat(7));
        assert_eq!(parse_rat(" 2 / 6 ").unwrap(), ratio(1, 3));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }
}
