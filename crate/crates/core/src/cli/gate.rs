//! Separability of the input over `K(X)`, decided by Euclid's algorithm
//! with rational function coefficients.

use std::collections::BTreeMap;

use crate::cli::parser::InputPoly;
use crate::error::{Error, Result};
use crate::scalars::{Rational, Rationals, Ring};
use crate::tower::{SplitOutcome, SplittingRing};
use crate::upoly::{egcd_branching, Poly};

type QPoly = Poly<Rationals>;

/// `K(X)`; elements are reduced fractions with monic denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RatFuncs;

#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    pub num: QPoly,
    pub den: QPoly,
}

fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_zero() && b.is_zero() {
        return Poly::one(Rationals);
    }
    egcd_branching(a, b).expect("not both zero").value().expect("fields never split").gcd
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(Rationals) };
        }
        let g = qgcd(&num, &den);
        let (mut n, mut d) = (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap());
        let lc = d.lead().unwrap().inv().unwrap();
        n = n.scale(&lc);
        d = d.scale(&lc);
        RatFunc { num: n, den: d }
    }

    pub fn poly(p: QPoly) -> RatFunc {
        RatFunc { num: p, den: Poly::one(Rationals) }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }
}

impl Ring for RatFuncs {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::poly(Poly::zero(Rationals))
    }
    fn one(&self) -> RatFunc {
        RatFunc::poly(Poly::one(Rationals))
    }
    fn from_rational(&self, r: &Rational) -> RatFunc {
        RatFunc::poly(Poly::constant(Rationals, r.clone()))
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.den == b.den {
            return RatFunc::new(&a.num + &b.num, a.den.clone());
        }
        RatFunc::new(&(&a.num * &b.den) + &(&b.num * &a.den), &a.den * &b.den)
    }
    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.add(a, &self.neg(b))
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: -&a.num, den: a.den.clone() }
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        RatFunc::new(&a.num * &b.num, &a.den * &b.den)
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_zero()
    }
    fn render(&self, a: &RatFunc) -> String {
        if a.is_polynomial() {
            a.num.render("X")
        } else {
            format!("({})/({})", a.num.render("X"), a.den.render("X"))
        }
    }
}

impl SplittingRing for RatFuncs {
    fn invert_or_split(&self, x: &RatFunc) -> SplitOutcome<Option<RatFunc>> {
        if x.num.is_zero() {
            SplitOutcome::Value(None)
        } else {
            SplitOutcome::Value(Some(RatFunc::new(x.den.clone(), x.num.clone())))
        }
    }
}

fn as_y_poly(f: &InputPoly) -> Poly<RatFuncs> {
    let coeffs = (0..=f.degree()).map(|k| RatFunc::poly(Poly::new(Rationals, f.y_coeff(k)))).collect();
    Poly::new(RatFuncs, coeffs)
}

/// `gcd(F, F_Y)` over `K(X)`, monic in `Y`.
pub fn y_discriminant_gcd(f: &InputPoly) -> Poly<RatFuncs> {
    let p = as_y_poly(f);
    egcd_branching(&p, &p.derivative()).expect("F is nonzero").value().expect("fields never split").gcd
}

/// Passes a separable input through; otherwise replaces it by its
/// separable associate when allowed, or reports the common factor.
pub fn separability_gate(f: &InputPoly, make_separable: bool) -> Result<InputPoly> {
    let g = y_discriminant_gcd(f);
    if g.deg() == 0 {
        return Ok(f.clone());
    }
    if !make_separable {
        return Err(Error::NotSeparableInput(g.render("Y")));
    }
    let h = as_y_poly(f).exact_div(&g)?;
    let mut terms = BTreeMap::new();
    for (k, c) in h.coeffs().iter().enumerate() {
        if !c.is_polynomial() {
            return Err(Error::InvariantViolation("monic factor with non-polynomial coefficient".into()));
        }
        let lc = c.den.coeff(0).inv()?;
        for (e, x) in c.num.coeffs().iter().enumerate() {
            if !x.is_zero() {
                terms.insert((k, e), x * &lc);
            }
        }
    }
    InputPoly::from_terms(&f.expr, terms)
}
