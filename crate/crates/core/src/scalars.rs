//! Exact rationals and the coefficient-ring contract.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Rational(self.0.recip()))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

pub fn rat_add(a: &Rational, b: &Rational) -> Rational {
    a + b
}

pub fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    a * b
}

pub fn rat_neg(a: &Rational) -> Rational {
    -a
}

pub fn rat_inv(a: &Rational) -> Result<Rational, Error> {
    a.inv()
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse { position: 0, message: format!("bad rational {s:?}") };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

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

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

/// Commutative ring with explicit context, so elements of a tower can
/// share the code written for plain rationals.
pub trait Ring: Clone + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, r: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem {
        self.mul(a, &self.from_rational(r))
    }

    /// Human-readable rendering.
    fn render(&self, a: &Self::Elem) -> String;
}

/// The base field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_rational(&self, r: &Rational) -> Rational {
        r.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
    fn scale(&self, a: &Rational, r: &Rational) -> Rational {
        a * r
    }
    fn render(&self, a: &Rational) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn small_examples() {
        assert_eq!(rat_add(&q(1, 2), &q(1, 3)), q(5, 6));
        assert_eq!(rat_add(&q(13, 36), &q(-13, 36)).to_string(), "0");
        assert_eq!(rat_inv(&q(2, 3)).unwrap(), q(3, 2));
        assert_eq!(rat_mul(&q(-1, 6), &q(-1, 6)), q(1, 36));
        assert!(matches!(rat_inv(&Rational::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q(-31, 351).to_string(), "-31/351");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!("6/-4".parse::<Rational>().unwrap(), q(-3, 2));
        assert!("1/0".parse::<Rational>().is_err());
    }

    fn arb() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| q(n, d))
    }

    fn canonical(r: &Rational) -> bool {
        use num_integer::Integer;
        r.denom() > &BigInt::zero() && r.numer().gcd(r.denom()) == BigInt::one()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn field_laws(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            for r in [&a + &b, &a * &c, -&b, &a - &c] {
                prop_assert!(canonical(&r));
            }
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Rational::one());
            }
        }
    }
}
