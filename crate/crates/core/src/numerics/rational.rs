//! Exact rationals and the combinatorial helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Q = BigRational;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`. Whitespace around the tokens is ignored.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {t:?}") };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if d.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Q::new(n, d))
}

/// Canonical text form: `"p/q"`, with `q` omitted when it is 1.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: &Q, n: usize) -> Q {
    let mut acc = Q::one();
    let mut t = a.clone();
    for _ in 0..n {
        acc *= &t;
        t += Q::one();
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Part of `x` in `(0, 1]`.
pub fn frac_01(x: &Q) -> Q {
    let f = x - x.floor();
    if f.is_zero() {
        Q::one()
    } else {
        f
    }
}

/// Least common multiple of the denominators.
pub fn denom_lcm<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Multiply a rational vector by the lcm of its denominators and divide by
/// the gcd of the numerators. Zero vectors are returned unchanged.
pub fn primitive_integer_vector(v: &[Q]) -> Vec<BigInt> {
    let l = denom_lcm(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_q(s).map_err(D::Error::custom)).collect()
        }
    }
}

/// Serde adapters that write big integers as decimal strings.
pub mod serde_int {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&q(7, 3), 0), qi(1));
        assert_eq!(pochhammer(&q(1, 2), 3), q(15, 8));
        assert_eq!(pochhammer(&qi(1), 4), qi(24));
        assert_eq!(pochhammer(&qi(1), 10), Q::from_integer(factorial(10)));
    }

    #[test]
    fn text_round_trip() {
        for s in ["3/8", "-7", "0", "-12012/5"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q(" 6/4 ").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn fractional_part_in_unit_interval() {
        assert_eq!(frac_01(&q(4, 3)), q(1, 3));
        assert_eq!(frac_01(&qi(2)), qi(1));
        assert_eq!(frac_01(&q(-1, 3)), q(2, 3));
    }
}
