//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Q {
    qf(1, 2)
}

pub fn is_int(x: &Q) -> bool {
    x.denom().is_one()
}

/// Exact conversion; `None` when `x` is not an integer or does not fit.
pub fn to_i64(x: &Q) -> Option<i64> {
    if is_int(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().numer().to_i64().expect("depth out of range")
}

/// True for even integers.
pub fn is_even_int(x: &Q) -> bool {
    is_int(x) && x.numer().is_even()
}

/// 2-adic valuation of the denominator of `x` (0 for integers and for 0).
pub fn ord2_denom(x: &Q) -> u32 {
    let mut d = x.denom().clone();
    let mut k = 0;
    let two = BigInt::from(2);
    while !d.is_zero() && d.is_even() {
        d /= &two;
        k += 1;
    }
    k
}

/// `"3"`, `"-1/2"`: integers without a denominator, everything in lowest terms.
pub fn fmt(x: &Q) -> String {
    if is_int(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Input(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Input(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// serde helper: rationals as "n" or "p/q" strings.
pub fn ser<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-5/3", "12/7"] {
            assert_eq!(fmt(&parse(s).unwrap()), s);
        }
        assert_eq!(fmt(&parse("6/4").unwrap()), "3/2");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn ord2() {
        assert_eq!(ord2_denom(&qf(3, 4)), 2);
        assert_eq!(ord2_denom(&qf(3, 6)), 1);
        assert_eq!(ord2_denom(&q(0)), 0);
        assert_eq!(ord2_denom(&q(5)), 0);
    }
}
