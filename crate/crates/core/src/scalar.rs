//! Exact scalars: arbitrary-precision rationals and elements of a real
//! quadratic field `Q(√d)`.
//!
//! A [`QuadNum`] carries its radicand. Rational values are stored with
//! radicand 1 so that every value has exactly one representation; this lets
//! a rational mix freely with any radicand, while two genuinely irrational
//! operands with different radicands are rejected.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("mixed radicands √{0} and √{1} in one expression")]
    RadicandMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse `{0}` as an exact number")]
    Parse(String),
}

/// `n/d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rat`].
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Sign of a rational as −1, 0 or +1.
pub fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Exact rendering: `p` or `p/q`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `4.9` or `-0.125`.
pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let t = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(err());
        }
        let whole = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).map_err(|_| err())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| err())?;
        let mut value = Rat::new(whole * &scale + frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str(t).map(Rat::from_integer).map_err(|_| err())
}

/// Serde adapter storing a [`Rat`] as its exact string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Splits `n = s²·d` with `d` square-free.
///
/// Trial division runs up to `n^(1/3)`; whatever survives has at most two
/// prime factors, so it is either a perfect square or square-free.
pub fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut core = BigUint::one();
    let limit = n.cbrt() + 1u32;
    let mut p = BigUint::from(2u32);
    while p <= limit && &p * &p <= rest {
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            square *= &p;
        }
        if (&rest % &p).is_zero() {
            rest /= &p;
            core *= &p;
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        (square * r, core)
    } else {
        (square, core * rest)
    }
}

/// `rational + radical·√radicand`, exact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadNum {
    rational: Rat,
    radical: Rat,
    radicand: u64,
}

impl QuadNum {
    /// Builds `a + b√d`, pulling square factors out of `d`.
    pub fn new(a: Rat, b: Rat, d: u64) -> Self {
        assert!(d > 0, "radicand must be positive");
        let (s, core) = square_free_split(&BigUint::from(d));
        let b = b * Rat::from_integer(BigInt::from_biguint(Sign::Plus, s));
        let core = core.to_u64().expect("square-free part of a u64 fits in u64");
        Self::canonical(a, b, core)
    }

    fn canonical(a: Rat, b: Rat, d: u64) -> Self {
        if b.is_zero() {
            Self {
                rational: a,
                radical: b,
                radicand: 1,
            }
        } else if d == 1 {
            Self {
                rational: a + b,
                radical: Rat::zero(),
                radicand: 1,
            }
        } else {
            Self {
                rational: a,
                radical: b,
                radicand: d,
            }
        }
    }

    pub fn from_rat(a: Rat) -> Self {
        Self {
            rational: a,
            radical: Rat::zero(),
            radicand: 1,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    /// `b·√d`.
    pub fn surd(b: Rat, d: u64) -> Self {
        Self::new(Rat::zero(), b, d)
    }

    /// `√d`.
    pub fn sqrt_of(d: u64) -> Self {
        Self::new(Rat::zero(), Rat::one(), d)
    }

    /// Square root of a non-negative rational, as an element of `Q(√d)`.
    pub fn sqrt_rat(r: &Rat) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Self::zero());
        }
        // √(n/m) = √(n·m)/m
        let nm = (r.numer() * r.denom()).to_biguint()?;
        let (s, d) = square_free_split(&nm);
        let coeff = Rat::new(BigInt::from_biguint(Sign::Plus, s), r.denom().clone());
        let d = d.to_u64()?;
        Some(Self::canonical(Rat::zero(), coeff, d))
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rational
    }

    pub fn radical_coeff(&self) -> &Rat {
        &self.radical
    }

    /// Radicand in use; 1 for rational values.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.rational)
    }

    /// Common radicand of two operands, if compatible.
    pub fn joint_radicand(&self, other: &Self) -> Result<u64, ScalarError> {
        match (self.radicand, other.radicand) {
            (1, d) | (d, 1) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(ScalarError::RadicandMismatch(d, e)),
        }
    }

    /// Galois conjugate `a − b√d`.
    pub fn conjugate(&self) -> Self {
        Self {
            rational: self.rational.clone(),
            radical: -self.radical.clone(),
            radicand: self.radicand,
        }
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> Rat {
        &self.rational * &self.rational - &self.radical * &self.radical * Rat::from_integer(BigInt::from(self.radicand))
    }

    /// Exact sign via one comparison of squared magnitudes.
    pub fn sign(&self) -> i32 {
        let sa = rat_sign(&self.rational);
        let sb = rat_sign(&self.radical);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with d·b²
        let a2 = &self.rational * &self.rational;
        let db2 = &self.radical * &self.radical * Rat::from_integer(BigInt::from(self.radicand));
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Greatest integer `n` with `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.rational.floor().to_integer();
        }
        // k = ⌊|b|√d⌋ = ⌊√⌊b²d⌋⌋ brackets the irrational part within one unit
        let b2d = &self.radical * &self.radical * Rat::from_integer(BigInt::from(self.radicand));
        let k = b2d.floor().to_integer().sqrt();
        let base = self.rational.floor().to_integer();
        let guess = if self.radical.is_positive() {
            base + &k
        } else {
            base - &k - 1
        };
        let mut n = guess;
        while (self.clone() - QuadNum::from_rat(Rat::from_integer(n.clone()))).is_negative() {
            n -= 1;
        }
        while !(self.clone() - QuadNum::from_rat(Rat::from_integer(n.clone() + 1))).is_negative() {
            n += 1;
        }
        n
    }

    pub fn recip(&self) -> Self {
        self.checked_recip().expect("reciprocal of zero")
    }

    pub fn checked_recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm();
        Ok(Self::canonical(
            self.rational.clone() / &n,
            -self.radical.clone() / n,
            self.radicand,
        ))
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        Ok(Self::canonical(
            &self.rational + &rhs.rational,
            &self.radical + &rhs.radical,
            d,
        ))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        Ok(Self::canonical(
            &self.rational - &rhs.rational,
            &self.radical - &rhs.radical,
            d,
        ))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        let dr = Rat::from_integer(BigInt::from(d));
        let a = &self.rational * &rhs.rational + &self.radical * &rhs.radical * dr;
        let b = &self.rational * &rhs.radical + &self.radical * &rhs.rational;
        Ok(Self::canonical(a, b, d))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.joint_radicand(rhs)?;
        self.checked_mul(&rhs.checked_recip()?)
    }

    /// Exact comparison; errors on incompatible radicands.
    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering, ScalarError> {
        Ok(self.checked_sub(other)?.sign().cmp(&0))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::canonical(&self.rational * r, &self.radical * r, self.radicand)
    }

    /// Approximate value, for rendering and curve fits only.
    pub fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        a + self.radical.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }

    /// Decimal rendering rounded half-up to `precision` fractional digits,
    /// computed exactly.
    pub fn to_decimal(&self, precision: usize) -> String {
        let scale = Rat::from_integer(BigInt::from(10u32).pow(precision as u32));
        let shifted = self.scale(&scale) + QuadNum::from_rat(rat(1, 2));
        let n = shifted.floor();
        let negative = n.is_negative();
        let digits = n.abs().to_string();
        let body = if precision == 0 {
            digits
        } else {
            let padded = format!("{:0>width$}", digits, width = precision + 1);
            let (int, frac) = padded.split_at(padded.len() - precision);
            format!("{int}.{frac}")
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Best rational approximation with denominator `2^bits`, rounded down.
    pub fn rational_floor_approx(&self, bits: u32) -> Rat {
        let scale = BigInt::one() << bits;
        let n = self.scale(&Rat::from_integer(scale.clone())).floor();
        Rat::new(n, scale)
    }
}

impl Default for QuadNum {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rat> for QuadNum {
    fn from(r: Rat) -> Self {
        Self::from_rat(r)
    }
}

impl From<i64> for QuadNum {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl PartialOrd for QuadNum {
    /// `None` when the radicands are incompatible.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

fn fmt_surd(b: &Rat, d: u64) -> String {
    if b.is_one() {
        format!("√{d}")
    } else if *b == -Rat::one() {
        format!("-√{d}")
    } else if b.is_integer() {
        format!("{}√{d}", b.numer())
    } else {
        format!("({})√{d}", rat_to_string(b))
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return f.write_str(&rat_to_string(&self.rational));
        }
        if self.rational.is_zero() {
            return f.write_str(&fmt_surd(&self.radical, self.radicand));
        }
        let sign = if self.radical.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {} {}",
            rat_to_string(&self.rational),
            sign,
            fmt_surd(&self.radical.abs(), self.radicand)
        )
    }
}

fn parse_surd(term: &str, whole: &str) -> Result<(Rat, u64), ScalarError> {
    let err = || ScalarError::Parse(whole.to_string());
    let (coeff, d) = term.split_once('√').ok_or_else(err)?;
    let d: u64 = d.trim().parse().map_err(|_| err())?;
    let coeff = coeff.trim();
    let coeff = match coeff {
        "" | "+" => Rat::one(),
        "-" => -Rat::one(),
        c => {
            let (neg, c) = match c.strip_prefix('-') {
                Some(rest) => (true, rest.trim()),
                None => (false, c),
            };
            let c = c.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(c);
            let v = parse_rat(c)?;
            if neg {
                -v
            } else {
                v
            }
        }
    };
    Ok((coeff, d))
}

impl FromStr for QuadNum {
    type Err = ScalarError;

    /// Accepts the [`Display`](fmt::Display) forms: `p/q`, `c√d`, `(p/q)√d`,
    /// `a + (p/q)√d`, `a - c√d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if !t.contains('√') {
            return parse_rat(t).map(QuadNum::from_rat);
        }
        // split at a binary + or - that is followed by the surd term
        let bytes: Vec<(usize, char)> = t.char_indices().collect();
        let mut split = None;
        for (i, (pos, ch)) in bytes.iter().enumerate() {
            if i > 0 && (*ch == '+' || *ch == '-') && bytes[i - 1].1 == ' ' {
                split = Some((*pos, *ch));
            }
        }
        match split {
            Some((pos, ch)) => {
                let a = parse_rat(&t[..pos])?;
                let (b, d) = parse_surd(&t[pos + ch.len_utf8()..], s)?;
                let b = if ch == '-' { -b } else { b };
                Ok(QuadNum::new(a, b, d))
            }
            None => {
                let (b, d) = parse_surd(t, s)?;
                Ok(QuadNum::new(Rat::zero(), b, d))
            }
        }
    }
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                (&self).$method(rhs)
            }
        }
        impl $tr<QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                self.$method(&rhs)
            }
        }
    };
}

// Operators panic on mixed radicands; use the `checked_*` forms to recover.
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum {
            rational: -self.rational,
            radical: -self.radical,
            radicand: self.radicand,
        }
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -self.clone()
    }
}

/// Minimal exact-field interface shared by [`Rat`] and [`QuadNum`], so that
/// classes can carry coefficients from either.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + From<Rat>
    + Zero
{
    fn sign(&self) -> i32;
}

impl Scalar for Rat {
    fn sign(&self) -> i32 {
        rat_sign(self)
    }
}

impl Scalar for QuadNum {
    fn sign(&self) -> i32 {
        QuadNum::sign(self)
    }
}

impl Zero for QuadNum {
    fn zero() -> Self {
        QuadNum::from_rat(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }
}

impl One for QuadNum {
    fn one() -> Self {
        QuadNum::from_rat(Rat::one())
    }
}

/// Integer `n` as a big integer helper used across modules.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Greatest common divisor of two non-negative integers.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: Rat, b: Rat) -> QuadNum {
        QuadNum::new(a, b, 6)
    }

    #[test]
    fn sign_examples() {
        assert_eq!(q(rat_int(0), rat_int(0)).sign(), 0);
        assert_eq!(q(rat_int(-5), rat_int(2)).sign(), -1);
        assert_eq!(q(rat(49, 10), rat_int(-2)).sign(), 1);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(q(rat(7, 2), rat_int(0)).floor(), big(3));
        assert_eq!(q(rat_int(0), rat_int(2)).floor(), big(4));
        assert_eq!(q(rat_int(0), rat_int(-2)).floor(), big(-5));
    }

    #[test]
    fn square_free_extraction() {
        let s = QuadNum::sqrt_of(24);
        assert_eq!(s, QuadNum::surd(rat_int(2), 6));
        assert_eq!(QuadNum::sqrt_of(49), QuadNum::from_int(7));
        assert_eq!(QuadNum::sqrt_rat(&rat(24, 25)).unwrap(), QuadNum::surd(rat(2, 5), 6));
        let (sq, core) = square_free_split(&BigUint::from(2u64 * 2 * 3 * 7 * 7 * 11));
        assert_eq!((sq, core), (BigUint::from(14u32), BigUint::from(33u32)));
        let (sq, core) = square_free_split(&BigUint::from(1_000_003u64 * 1_000_003));
        assert_eq!((sq, core), (BigUint::from(1_000_003u64), BigUint::one()));
    }

    #[test]
    fn mixed_radicands_rejected() {
        let a = QuadNum::sqrt_of(6);
        let b = QuadNum::sqrt_of(3);
        assert_eq!(a.checked_add(&b), Err(ScalarError::RadicandMismatch(6, 3)));
        assert!(a.partial_cmp(&b).is_none());
        // rationals combine with anything
        assert!(a.checked_mul(&QuadNum::from_int(3)).is_ok());
    }

    #[test]
    fn render_and_parse() {
        let c = q(rat(49, 50), rat(-2, 5));
        assert_eq!(c.to_string(), "49/50 - (2/5)√6");
        assert_eq!(c.to_string().parse::<QuadNum>().unwrap(), c);
        assert_eq!(QuadNum::surd(rat_int(10), 3).to_string(), "10√3");
        assert_eq!("-√6".parse::<QuadNum>().unwrap(), -QuadNum::sqrt_of(6));
        assert_eq!("4.9".parse::<QuadNum>().unwrap(), QuadNum::from_rat(rat(49, 10)));
        assert!("4/0".parse::<QuadNum>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        let c = q(rat(49, 50), rat(-2, 5));
        assert_eq!(c.to_decimal(8), "0.00020410");
        assert_eq!(QuadNum::from_rat(rat(-1, 3)).to_decimal(3), "-0.333");
        assert_eq!(QuadNum::from_int(288).to_decimal(2), "288.00");
        assert_eq!(QuadNum::sqrt_of(6).to_decimal(0), "2");
    }
}
