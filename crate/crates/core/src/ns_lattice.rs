//! Néron–Severi classes on `S = E×E` for an elliptic curve without complex
//! multiplication.
//!
//! Classes are written `x·f₁ + y·f₂ + z·δ` where `f₁ = [{P}×E]`,
//! `f₂ = [E×{P}]` and `δ` is the diagonal. The intersection form has
//! `fᵢ² = δ² = 0` and every mixed product equal to 1. On this surface the
//! pseudoeffective cone is the nef cone, cut out by `xy+yz+zx ≥ 0` and
//! `x+y+z ≥ 0`.

use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{parse_rat, rat_int, rat_to_string, QuadNum, Rat, Scalar, ScalarError};

/// Exact string encoding used in JSON artifacts.
pub trait ExactString: Sized {
    fn to_exact(&self) -> String;
    fn from_exact(s: &str) -> Result<Self, ScalarError>;
}

impl ExactString for Rat {
    fn to_exact(&self) -> String {
        rat_to_string(self)
    }
    fn from_exact(s: &str) -> Result<Self, ScalarError> {
        parse_rat(s)
    }
}

impl ExactString for QuadNum {
    fn to_exact(&self) -> String {
        self.to_string()
    }
    fn from_exact(s: &str) -> Result<Self, ScalarError> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NsClass<T = Rat> {
    pub x: T,
    pub y: T,
    pub z: T,
}

#[derive(Serialize, Deserialize)]
struct NsClassRepr {
    x: String,
    y: String,
    z: String,
}

impl<T: ExactString> Serialize for NsClass<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NsClassRepr {
            x: self.x.to_exact(),
            y: self.y.to_exact(),
            z: self.z.to_exact(),
        }
        .serialize(s)
    }
}

impl<'de, T: ExactString> Deserialize<'de> for NsClass<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = NsClassRepr::deserialize(d)?;
        let conv = |s: &str| T::from_exact(s).map_err(serde::de::Error::custom);
        Ok(NsClass {
            x: conv(&r.x)?,
            y: conv(&r.y)?,
            z: conv(&r.z)?,
        })
    }
}

impl NsClass<Rat> {
    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        NsClass {
            x: rat_int(x),
            y: rat_int(y),
            z: rat_int(z),
        }
    }

    pub fn f1() -> Self {
        Self::from_ints(1, 0, 0)
    }

    pub fn f2() -> Self {
        Self::from_ints(0, 1, 0)
    }

    pub fn delta() -> Self {
        Self::from_ints(0, 0, 1)
    }

    pub fn to_diag(&self) -> DiagCoords {
        DiagCoords {
            a: &self.x + &self.y - rat_int(2) * &self.z,
            b_coeff: &self.y - &self.x,
            c: rat_int(2) * (&self.x + &self.y + &self.z),
        }
    }

    /// Nef (equivalently pseudoeffective) test in diagonal coordinates:
    /// `c² ≥ a² + b²` and `c ≥ 0`.
    pub fn is_nef(&self) -> bool {
        let d = self.to_diag();
        !d.cone_gap().is_negative() && !d.c.is_negative()
    }

    /// Pseudoeffective cone equals the nef cone on `E×E`.
    pub fn is_psef(&self) -> bool {
        self.is_nef()
    }

    /// Strict interior of the nef cone.
    pub fn is_ample(&self) -> bool {
        let d = self.to_diag();
        d.cone_gap().is_positive() && d.c.is_positive()
    }

    pub fn to_quad(&self) -> NsClass<QuadNum> {
        self.map(|v| QuadNum::from_rat(v.clone()))
    }

    /// Parses `x,y,z` with exact rational entries.
    pub fn parse_triple(s: &str) -> Result<Self, ScalarError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(ScalarError::Parse(s.to_string()));
        }
        Ok(NsClass {
            x: parse_rat(parts[0])?,
            y: parse_rat(parts[1])?,
            z: parse_rat(parts[2])?,
        })
    }
}

impl<T: Scalar> NsClass<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        NsClass { x, y, z }
    }

    pub fn zero() -> Self {
        NsClass {
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> NsClass<U> {
        NsClass {
            x: f(&self.x),
            y: f(&self.y),
            z: f(&self.z),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    /// Symmetric bilinear intersection pairing.
    pub fn intersect(&self, o: &Self) -> T {
        let (x, y, z) = (self.x.clone(), self.y.clone(), self.z.clone());
        let (u, v, w) = (o.x.clone(), o.y.clone(), o.z.clone());
        (x.clone() * v.clone() + u.clone() * y.clone()) + (x * w.clone() + u * z.clone()) + (y * w + v * z)
    }

    pub fn self_intersection(&self) -> T {
        self.intersect(self)
    }

    /// `xy + yz + zx`, half the self-intersection.
    pub fn half_square(&self) -> T {
        self.x.clone() * self.y.clone() + self.y.clone() * self.z.clone() + self.z.clone() * self.x.clone()
    }

    pub fn degree_sum(&self) -> T {
        self.x.clone() + self.y.clone() + self.z.clone()
    }

    /// Nef test by the defining inequalities, valid for any exact scalar.
    pub fn is_nef_form(&self) -> bool {
        self.half_square().sign() >= 0 && self.degree_sum().sign() >= 0
    }

    pub fn is_ample_form(&self) -> bool {
        self.half_square().sign() > 0 && self.degree_sum().sign() > 0
    }
}

impl<T: Scalar> Add for NsClass<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        NsClass {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }
}

impl<T: Scalar> Sub for NsClass<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        NsClass {
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }
}

impl<T: Scalar> Neg for NsClass<T> {
    type Output = Self;
    fn neg(self) -> Self {
        NsClass {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Coordinates `(a, b, c)` in which the form becomes `(c² − a² − b²)/6`.
/// `b` is irrational in general and is stored as its coefficient of `√3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagCoords {
    #[serde(with = "crate::scalar::serde_rat")]
    pub a: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub b_coeff: Rat,
    #[serde(with = "crate::scalar::serde_rat")]
    pub c: Rat,
}

impl DiagCoords {
    pub fn b(&self) -> QuadNum {
        QuadNum::surd(self.b_coeff.clone(), 3)
    }

    pub fn b_squared(&self) -> Rat {
        rat_int(3) * &self.b_coeff * &self.b_coeff
    }

    /// `c² − a² − b²`, rational because `b²` is.
    pub fn cone_gap(&self) -> Rat {
        &self.c * &self.c - &self.a * &self.a - self.b_squared()
    }

    pub fn to_class(&self) -> NsClass<Rat> {
        let z = (&self.c / rat_int(2) - &self.a) / rat_int(3);
        let sum_xy = &self.a + rat_int(2) * &z;
        let y = (&sum_xy + &self.b_coeff) / rat_int(2);
        let x = sum_xy - &y;
        NsClass { x, y, z }
    }
}

impl Default for NsClass<Rat> {
    fn default() -> Self {
        NsClass {
            x: Rat::zero(),
            y: Rat::zero(),
            z: Rat::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l0() -> NsClass {
        NsClass::from_ints(4, 4, 1)
    }

    fn l2() -> NsClass {
        NsClass::from_ints(-1, 9, 1)
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(NsClass::f1().intersect(&NsClass::f2()), rat_int(1));
        assert_eq!(l0().intersect(&l0()), rat_int(48));
        assert_eq!(l0().intersect(&l2()), rat_int(48));
        assert_eq!(l2().self_intersection(), rat_int(-2));
    }

    #[test]
    fn diag_examples() {
        let d0 = l0().to_diag();
        assert_eq!(
            (d0.a.clone(), d0.b_coeff.clone(), d0.c.clone()),
            (rat_int(6), rat_int(0), rat_int(18))
        );
        let d2 = l2().to_diag();
        assert_eq!(
            (d2.a.clone(), d2.b_coeff.clone(), d2.c.clone()),
            (rat_int(6), rat_int(10), rat_int(18))
        );
        assert_eq!(d2.b().to_string(), "10√3");
        assert_eq!(NsClass::default().to_diag().cone_gap(), rat_int(0));
        assert_eq!(d2.to_class(), l2());
    }

    #[test]
    fn nef_and_ample_examples() {
        assert!(l0().is_nef() && l0().is_ample());
        let f1 = NsClass::f1();
        assert!(f1.is_nef() && !f1.is_ample());
        let d = f1.to_diag();
        assert_eq!(&d.c * &d.c, rat_int(4));
        assert_eq!(&d.a * &d.a + d.b_squared(), rat_int(4));
        assert!(!l2().is_nef());
        assert_eq!(l2().to_diag().cone_gap(), rat_int(324 - 36 - 300));
        assert!(!NsClass::default().is_ample());
        assert!(NsClass::default().is_nef());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&NsClass::from_ints(-1, 9, 1)).unwrap();
        assert_eq!(s, r#"{"x":"-1","y":"9","z":"1"}"#);
        let back: NsClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l2());
    }
}
