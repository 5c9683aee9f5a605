//! Exact arithmetic in the ordered field `Q(sqrt 2)`.
//!
//! Every slope comparison in this crate goes through [`Scalar`], which stores
//! a value `a + b*sqrt2` with exact rational components. The sign of such a
//! value is decided without any floating point: compare the signs of `a` and
//! `b`, and when they disagree compare `a^2` against `2*b^2`. One formal
//! irrational is enough because each ladder charge mixes at most two
//! skyscrapers, one of them scaled by a single irrational parameter.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        )))
    }

    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numerator, denominator)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn sign(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    /// Exact integer value, if the denominator is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let r = p.rational()?;
        p.finish()?;
        Ok(r)
    }
}

/// Element `a + b*sqrt2` of the real quadratic field `Q(sqrt 2)`.
///
/// Equality is componentwise (1 and sqrt2 are linearly independent over Q)
/// and the ordering agrees with the ordering of real numbers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    a: Rational,
    b: Rational,
}

impl Scalar {
    pub fn new(a: Rational, b: Rational) -> Self {
        Scalar { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        Scalar { a, b: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_int(n))
    }

    pub fn sqrt2() -> Self {
        Scalar { a: Rational::zero(), b: Rational::one() }
    }

    pub fn zero() -> Self {
        Scalar::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign of `a + b*sqrt2`.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            // Signs disagree: |a| vs |b|*sqrt2 decided by a^2 vs 2 b^2.
            // a^2 = 2 b^2 is impossible for nonzero rationals.
            _ => {
                let a2 = &self.a * &self.a;
                let b2 = Rational::from_int(2) * (&self.b * &self.b);
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                    Ordering::Equal => unreachable!("sqrt2 is irrational"),
                }
            }
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        // 1/(a + b*sqrt2) = (a - b*sqrt2) / (a^2 - 2 b^2)
        let norm = &self.a * &self.a - Rational::from_int(2) * (&self.b * &self.b);
        let inv = norm.recip()?;
        Ok(Scalar { a: &self.a * &inv, b: -&(&self.b * &inv) })
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * std::f64::consts::SQRT_2
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // (a1 + b1 s)(a2 + b2 s) = a1 a2 + 2 b1 b2 + (a1 b2 + a2 b1) s
        let a = &self.a * &rhs.a + Rational::from_int(2) * (&self.b * &rhs.b);
        let b = &self.a * &rhs.b + &rhs.a * &self.b;
        Scalar { a, b }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { a: -&self.a, b: -&self.b }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.recip().expect("division by zero Scalar")
    }
}

impl Scalar {
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        Scalar { a: &self.a * r, b: &self.b * r }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.b.is_negative() {
            write!(f, "{}-{}*sqrt2", self.a, self.b.abs())
        } else {
            write!(f, "{}+{}*sqrt2", self.a, self.b)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_scalar(&s).map_err(de::Error::custom)
    }
}

/// Parse the canonical text form: `<rat>`, `<rat>+<rat>*sqrt2` or
/// `<rat>-<rat>*sqrt2`, where `<rat>` is an optionally signed integer with an
/// optional `/<positive integer>` suffix.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let mut p = Parser::new(text);
    let a = p.rational()?;
    if p.at_end() {
        return Ok(Scalar::from_rational(a));
    }
    let negate = match p.peek() {
        Some('+') => false,
        Some('-') => true,
        _ => return Err(p.error("expected '+', '-' or end of input")),
    };
    p.advance();
    let mut b = p.rational()?;
    p.expect('*')?;
    p.keyword("sqrt2")?;
    p.finish()?;
    if negate {
        b = -b;
    }
    Ok(Scalar::new(a, b))
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.bytes.get(self.pos).map(|&b| b as char)
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        for c in word.chars() {
            self.expect(c)?;
        }
        Ok(())
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.advance();
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        BigInt::from_str(s).map_err(|_| self.error("invalid integer"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let negate = match self.peek() {
            Some('-') => {
                self.advance();
                true
            }
            Some('+') => {
                self.advance();
                false
            }
            _ => false,
        };
        let mut numer = self.digits()?;
        if negate {
            numer = -numer;
        }
        let denom = if self.peek() == Some('/') {
            self.advance();
            let at = self.pos;
            let d = self.digits()?;
            if d.is_zero() {
                return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
            }
            d
        } else {
            BigInt::one()
        };
        Rational::from_big(numer, denom)
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

/// Convenience constructor: `rat(n, d)` panics on a zero denominator, which
/// only ever comes from literals in this crate and its tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: Rational, b: Rational) -> Scalar {
        Scalar::new(a, b)
    }

    #[test]
    fn conjugate_product() {
        let x = s(rat(1, 1), rat(1, 1));
        let y = s(rat(1, 1), rat(-1, 1));
        assert_eq!(&x * &y, Scalar::from_int(-1));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let r = Scalar::sqrt2();
        assert_eq!(&r * &r, Scalar::from_int(2));
    }

    #[test]
    fn componentwise_addition() {
        let x = s(rat(1, 2), rat(3, 4));
        let y = s(rat(1, 2), rat(1, 4));
        assert_eq!(&x + &y, s(rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn compare_minus_one_plus_sqrt2_with_zero() {
        let x = s(rat(-1, 1), rat(1, 1));
        assert_eq!(x.cmp(&Scalar::zero()), Ordering::Greater);
    }

    #[test]
    fn compare_three_halves_with_irrational() {
        // 3/2 vs 1 + (1/4) sqrt2: difference 1/2 - (1/4) sqrt2, and
        // (1/2)^2 = 1/4 > 2 (1/4)^2 = 1/8, so the difference is positive.
        let x = Scalar::from_rational(rat(3, 2));
        let y = s(rat(1, 1), rat(1, 4));
        assert_eq!(x.cmp(&y), Ordering::Greater);
    }

    #[test]
    fn compare_reflexive() {
        let x = s(rat(5, 7), rat(-2, 3));
        assert_eq!(x.cmp(&x), Ordering::Equal);
    }

    #[test]
    fn parse_embedding() {
        assert_eq!(parse_scalar("3/4").unwrap(), Scalar::from_rational(rat(3, 4)));
    }

    #[test]
    fn parse_full_form() {
        assert_eq!(parse_scalar("1/2+3/4*sqrt2").unwrap(), s(rat(1, 2), rat(3, 4)));
        assert_eq!(parse_scalar("1/2-3/4*sqrt2").unwrap(), s(rat(1, 2), rat(-3, 4)));
        assert_eq!(parse_scalar("-2+1*sqrt2").unwrap(), s(rat(-2, 1), rat(1, 1)));
    }

    #[test]
    fn parse_zero_denominator_fails() {
        let err = parse_scalar("1/0").unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_trailing_garbage_fails() {
        assert!(parse_scalar("1/2+3/4*sqrt2x").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("sqrt2").is_err());
    }

    #[test]
    fn display_roundtrip() {
        for sc in [
            Scalar::from_int(0),
            Scalar::from_int(-7),
            s(rat(1, 2), rat(3, 4)),
            s(rat(0, 1), rat(-5, 3)),
            s(rat(-2, 9), rat(1, 1)),
        ] {
            assert_eq!(parse_scalar(&sc.to_string()).unwrap(), sc);
        }
    }

    #[test]
    fn division() {
        let x = s(rat(3, 1), rat(1, 2));
        let y = s(rat(1, 1), rat(-1, 1));
        let q = x.checked_div(&y).unwrap();
        assert_eq!(&q * &y, x);
        assert!(Scalar::zero().recip().is_err());
    }

    #[test]
    fn ordering_respects_reals() {
        // 1 + sqrt2 > 2 > sqrt2 > 1 > 3 - 2 sqrt2 > 0 > -sqrt2
        let vals = [
            s(rat(1, 1), rat(1, 1)),
            Scalar::from_int(2),
            Scalar::sqrt2(),
            Scalar::one(),
            s(rat(3, 1), rat(-2, 1)),
            Scalar::zero(),
            s(rat(0, 1), rat(-1, 1)),
        ];
        for w in vals.windows(2) {
            assert_eq!(w[0].cmp(&w[1]), Ordering::Greater, "{} vs {}", w[0], w[1]);
        }
    }
}
