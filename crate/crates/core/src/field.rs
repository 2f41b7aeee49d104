//! Exact scalars: arbitrary-precision rationals and prime fields.
//!
//! A [`Scalar`] always knows which field it lives in. Arithmetic between
//! scalars of different fields is a programming error and panics; the
//! matrix layer checks field descriptors up front and reports
//! [`Error::FieldMismatch`](crate::Error::FieldMismatch) instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Field descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    /// Prime field of the given characteristic (fits in a machine word).
    Prime(u64),
}

impl Field {
    /// Prime field 𝔽ₚ; `p` must be a prime below 2⁶³.
    pub fn prime(p: u64) -> Result<Self, Error> {
        if p <= i64::MAX as u64 && is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::Parse(format!("{p} is not a prime")))
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::zero()),
            Field::Prime(p) => Scalar::Mod { value: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod {
                value: (n as i128).rem_euclid(p as i128) as u64,
                p,
            },
        }
    }

    /// `num / den` interpreted in this field; `None` when the denominator vanishes.
    pub fn from_ratio(self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.from_i64(den);
        let inv = d.inv()?;
        Some(self.from_i64(num) * inv)
    }

    /// Interprets a rational number in this field.
    pub fn from_rational(self, q: &BigRational) -> Option<Scalar> {
        match self {
            Field::Rationals => Some(Scalar::Rat(q.clone())),
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let reduce = |x: &BigInt| -> i64 {
                    let r = ((x % &m) + &m) % &m;
                    r.to_i64().expect("residue fits in i64")
                };
                self.from_ratio(reduce(q.numer()), reduce(q.denom()))
            }
        }
    }

    /// Parses a rational literal such as `-1`, `2`, `1/3` and maps it into the field.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar, Error> {
        let q = parse_rational(text)?;
        self.from_rational(&q)
            .ok_or_else(|| Error::Parse(format!("`{text}` has a denominator divisible by the characteristic")))
    }

    /// All elements, for finite fields only.
    pub fn elements(self) -> Option<Vec<Scalar>> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some((0..p).map(|value| Scalar::Mod { value, p }).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "Q" || s == "QQ" {
            return Ok(Field::Rationals);
        }
        let rest = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix("F"))
            .ok_or_else(|| Error::Parse(format!("unknown field `{s}` (expected Q or Fp:<p>)")))?;
        let p: u64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad characteristic in `{s}`")))?;
        Field::prime(p)
    }
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad rational `{text}`"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime(p: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if p < 2 {
        return false;
    }
    for b in BASES {
        if p % b == 0 {
            return p == b;
        }
    }
    let mut d = p - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for b in BASES {
        let mut x = pow_mod(b, d, p);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, p);
            if x == p - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of ℚ (lowest terms, positive denominator) or of 𝔽ₚ (representative in `[0, p)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { value: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rat(q) => Scalar::Rat(q.recip()),
            Scalar::Mod { value, p } => Scalar::Mod {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            },
        })
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = self.field().one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * &base;
        }
        acc
    }

    /// `(-1)^n` in the field of `self`.
    pub fn sign_power(field: Field, n: usize) -> Scalar {
        if n % 2 == 0 {
            field.one()
        } else {
            -field.one()
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(q) => Some(q),
            Scalar::Mod { .. } => None,
        }
    }

    fn check(&self, other: &Scalar) {
        if self.field() != other.field() {
            panic!("scalar field mismatch: {} vs {}", self.field(), other.field());
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { value, p } => Scalar::Mod {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

/// Integer view of a rational scalar, if it is one.
pub fn to_i64(s: &Scalar) -> Option<i64> {
    match s {
        Scalar::Rat(q) if q.is_integer() => q.numer().to_i64(),
        Scalar::Rat(_) => None,
        Scalar::Mod { value, .. } => i64::try_from(*value).ok(),
    }
}

/// True if a rational scalar is negative; prime-field scalars are never negative.
pub fn is_negative(s: &Scalar) -> bool {
    matches!(s, Scalar::Rat(q) if q.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_inverse_roundtrip() {
        let q = Field::Rationals;
        let a = q.from_ratio(-3, 7).unwrap();
        assert!((a.clone() * a.inv().unwrap()).is_one());
        assert_eq!(a.to_string(), "-3/7");
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(5).unwrap();
        let two = f.from_i64(2);
        assert_eq!(two.inv().unwrap(), f.from_i64(3));
        assert_eq!(f.from_i64(-1), f.from_i64(4));
        assert_eq!(f.parse_scalar("1/3").unwrap(), f.from_i64(2));
        assert!(f.parse_scalar("1/5").is_err());
    }

    #[test]
    fn field_parsing() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rationals);
        assert_eq!("Fp:2".parse::<Field>().unwrap(), Field::Prime(2));
        assert!("Fp:9".parse::<Field>().is_err());
        assert!("R".parse::<Field>().is_err());
    }

    #[test]
    #[should_panic(expected = "field mismatch")]
    fn mixing_fields_panics() {
        let _ = Field::Rationals.one() + Field::Prime(3).one();
    }

    #[test]
    fn large_prime_multiplication() {
        let p = 9_223_372_036_854_775_783u64; // largest prime below 2^63
        let f = Field::prime(p).unwrap();
        let a = f.from_i64(-2);
        let b = a.inv().unwrap();
        assert!((a * b).is_one());
    }
}
