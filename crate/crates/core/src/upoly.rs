//! Dense univariate polynomials over a coefficient ring, with the
//! branching gcd machinery that drives dynamic evaluation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{Rational, Ring};
use crate::tower::{SplitOutcome, SplittingRing};

/// Polynomial with coefficients listed lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Clone)]
pub struct Poly<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> Poly<R> {
    pub fn new(ring: R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly { ring, coeffs }
    }

    pub fn zero(ring: R) -> Self {
        Poly { ring, coeffs: Vec::new() }
    }

    pub fn one(ring: R) -> Self {
        let one = ring.one();
        Poly { ring, coeffs: vec![one] }
    }

    pub fn constant(ring: R, c: R::Elem) -> Self {
        Poly::new(ring, vec![c])
    }

    pub fn monomial(ring: R, c: R::Elem, k: usize) -> Self {
        let mut coeffs = vec![ring.zero(); k];
        coeffs.push(c);
        Poly::new(ring, coeffs)
    }

    /// The variable itself.
    pub fn var(ring: R) -> Self {
        let one = ring.one();
        Poly::monomial(ring, one, 1)
    }

    /// `X - a`.
    pub fn linear(ring: R, a: &R::Elem) -> Self {
        let c = ring.neg(a);
        let one = ring.one();
        Poly::new(ring, vec![c, one])
    }

    pub fn from_rationals(ring: R, cs: &[Rational]) -> Self {
        let coeffs = cs.iter().map(|c| ring.from_rational(c)).collect();
        Poly::new(ring, coeffs)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// Coefficient of `X^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> R::Elem {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Option<&R::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| self.ring.is_one(c))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(x, c)).collect();
        Poly::new(self.ring.clone(), coeffs)
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.ring.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { ring: self.ring.clone(), coeffs }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.ring.scale(c, &Rational::from_int(i as i64)))
            .collect();
        Poly::new(self.ring.clone(), coeffs)
    }

    pub fn eval(&self, x: &R::Elem) -> R::Elem {
        let mut acc = self.ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.ring.add(&self.ring.mul(&acc, x), c);
        }
        acc
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::one(self.ring.clone());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Division with remainder by a monic divisor.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self)> {
        if !d.is_monic() {
            return Err(Error::NotMonic);
        }
        let ring = &self.ring;
        let dd = d.deg();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(ring.clone()), self.clone()));
        }
        let mut quot = vec![ring.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].clone();
            if ring.is_zero(&c) {
                continue;
            }
            quot[k - dd] = c.clone();
            for (j, dj) in d.coeffs[..dd].iter().enumerate() {
                if !ring.is_zero(dj) {
                    rem[k - dd + j] = ring.sub(&rem[k - dd + j], &ring.mul(&c, dj));
                }
            }
            rem[k] = ring.zero();
        }
        rem.truncate(dd);
        Ok((Poly::new(ring.clone(), quot), Poly::new(ring.clone(), rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.divmod(d)?.1)
    }

    /// Quotient of an exact division; errors if the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.divmod(d)?;
        if !r.is_zero() {
            return Err(Error::InvariantViolation("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Applies `f` to every coefficient, landing in another ring.
    pub fn map<S: Ring>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> Poly<S> {
        let coeffs = self.coeffs.iter().map(f).collect();
        Poly::new(ring, coeffs)
    }

    /// Composition `self(g)`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero(self.ring.clone());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(self.ring.clone(), c.clone());
        }
        acc
    }

    /// Rendering in descending degree.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if self.ring.is_zero(c) {
                continue;
            }
            let body = self.ring.render(c);
            let (neg, body) = match body.strip_prefix('-') {
                Some(rest) if !rest.contains([' ']) => (true, rest.to_string()),
                _ => (false, body),
            };
            let compound = body.contains(' ');
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let term = if k == 0 {
                if compound {
                    format!("({body})")
                } else {
                    body
                }
            } else if body == "1" {
                mono
            } else if compound {
                format!("({body})*{mono}")
            } else {
                format!("{body}*{mono}")
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("X"))
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("X"))
    }
}

impl<R: Ring> Add for &Poly<R> {
    type Output = Poly<R>;
    fn add(self, rhs: &Poly<R>) -> Poly<R> {
        let ring = &self.ring;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => ring.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(ring.clone(), coeffs)
    }
}

impl<R: Ring> Sub for &Poly<R> {
    type Output = Poly<R>;
    fn sub(self, rhs: &Poly<R>) -> Poly<R> {
        self + &(-rhs)
    }
}

impl<R: Ring> Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        Poly { ring: self.ring.clone(), coeffs }
    }
}

impl<R: Ring> Mul for &Poly<R> {
    type Output = Poly<R>;
    fn mul(self, rhs: &Poly<R>) -> Poly<R> {
        let ring = &self.ring;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(ring.clone());
        }
        let mut out = vec![ring.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if ring.is_zero(b) {
                    continue;
                }
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        Poly::new(ring.clone(), out)
    }
}

/// Result of the branching extended gcd on one branch:
/// `f = f1·gcd`, `g = g1·gcd`, `u·f1 + v·g1 = 1`, `gcd` monic.
#[derive(Clone, Debug)]
pub struct Egcd<R: Ring> {
    pub gcd: Poly<R>,
    pub u: Poly<R>,
    pub v: Poly<R>,
    pub f1: Poly<R>,
    pub g1: Poly<R>,
}

macro_rules! try_split {
    ($e:expr) => {
        match $e {
            SplitOutcome::Value(v) => v,
            SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
        }
    };
}

/// Inverse of a structurally nonzero element, or the split it forces.
fn unit_inverse<R: SplittingRing>(ring: &R, c: &R::Elem) -> Result<SplitOutcome<R::Elem>> {
    match ring.invert_or_split(c) {
        SplitOutcome::Value(Some(inv)) => Ok(SplitOutcome::Value(inv)),
        SplitOutcome::Value(None) => {
            Err(Error::InvariantViolation("leading coefficient tested zero".into()))
        }
        SplitOutcome::Split(parts) => Ok(SplitOutcome::Split(parts)),
    }
}

/// Extended Euclid over a ring that may force splits at leading coefficients.
pub fn egcd_branching<R: SplittingRing>(f: &Poly<R>, g: &Poly<R>) -> Result<SplitOutcome<Egcd<R>>> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::BothZero);
    }
    let ring = f.ring().clone();
    let one = Poly::one(ring.clone());
    let zero = Poly::zero(ring.clone());
    let (mut r0, mut s0, mut t0) = (f.clone(), one.clone(), zero.clone());
    let (mut r1, mut s1, mut t1) = (g.clone(), zero, one);
    if r0.deg() < r1.deg() {
        std::mem::swap(&mut r0, &mut r1);
        std::mem::swap(&mut s0, &mut s1);
        std::mem::swap(&mut t0, &mut t1);
    }
    loop {
        if r1.is_zero() {
            let inv = try_split!(unit_inverse(&ring, r0.lead().unwrap())?);
            let gcd = r0.scale(&inv);
            let u = s0.scale(&inv);
            let v = t0.scale(&inv);
            let f1 = f.exact_div(&gcd)?;
            let g1 = g.exact_div(&gcd)?;
            return Ok(SplitOutcome::Value(Egcd { gcd, u, v, f1, g1 }));
        }
        let inv = try_split!(unit_inverse(&ring, r1.lead().unwrap())?);
        let r1n = r1.scale(&inv);
        let s1n = s1.scale(&inv);
        let t1n = t1.scale(&inv);
        let (q, r) = r0.divmod(&r1n)?;
        let s2 = &s0 - &(&q * &s1n);
        let t2 = &t0 - &(&q * &t1n);
        r0 = r1n;
        s0 = s1n;
        t0 = t1n;
        r1 = r;
        s1 = s2;
        t1 = t2;
    }
}

/// Squarefree part `h` of a monic `f` with a separability certificate.
#[derive(Clone, Debug)]
pub struct SeparableAssociate<R: Ring> {
    pub h: Poly<R>,
    /// `r·h + s·h' = 1`
    pub r: Poly<R>,
    pub s: Poly<R>,
}

pub fn separable_associate<R: SplittingRing>(f: &Poly<R>) -> Result<SplitOutcome<SeparableAssociate<R>>> {
    if f.is_constant() {
        return Err(Error::Constant);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let e = try_split!(egcd_branching(f, &f.derivative())?);
    let h = e.f1;
    let c = try_split!(egcd_branching(&h, &h.derivative())?);
    if c.gcd.deg() != 0 {
        return Err(Error::InvariantViolation("separable associate is not separable".into()));
    }
    Ok(SplitOutcome::Value(SeparableAssociate { h, r: c.u, s: c.v }))
}

/// Multiplicity of a known root: `q = (Z - a)^s · L` with `L(a)` a unit.
pub fn root_multiplicity<R: SplittingRing>(
    q: &Poly<R>,
    a: &R::Elem,
) -> Result<SplitOutcome<(usize, Poly<R>)>> {
    let ring = q.ring().clone();
    if !q.is_monic() {
        return Err(Error::NotMonic);
    }
    if !ring.is_zero(&q.eval(a)) {
        return Err(Error::PreconditionViolation("value is not a root".into()));
    }
    let lin = Poly::linear(ring.clone(), a);
    let mut cur = q.exact_div(&lin)?;
    let mut s = 1;
    loop {
        match ring.invert_or_split(&cur.eval(a)) {
            SplitOutcome::Value(Some(_)) => return Ok(SplitOutcome::Value((s, cur))),
            SplitOutcome::Value(None) => {
                cur = cur.exact_div(&lin)?;
                s += 1;
            }
            SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
        }
    }
}

/// Cofactors `(h_star, g_star)` with `g0·h_star + h0·g_star = 1`,
/// `deg h_star < deg h0`, `deg g_star < deg g0`.
pub fn bezout_pair<R: SplittingRing>(g0: &Poly<R>, h0: &Poly<R>) -> Result<SplitOutcome<(Poly<R>, Poly<R>)>> {
    if !g0.is_monic() || !h0.is_monic() {
        return Err(Error::NotMonic);
    }
    let e = try_split!(egcd_branching(g0, h0)?);
    if e.gcd.deg() != 0 {
        return Err(Error::NotCoprime);
    }
    let (k, h_star) = e.u.divmod(h0)?;
    let g_star = &e.v + &(&k * g0);
    Ok(SplitOutcome::Value((h_star, g_star)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rationals;
    use proptest::prelude::*;

    fn qp(cs: &[i64]) -> Poly<Rationals> {
        Poly::new(Rationals, cs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    #[test]
    fn divmod_degree_cases() {
        let x = qp(&[0, 1]);
        let d = qp(&[1, 0, 1]);
        let (q, r) = x.divmod(&d).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, x);
        let (q, r) = x.divmod(&qp(&[1])).unwrap();
        assert_eq!(q, x);
        assert!(r.is_zero());
        assert_eq!(x.divmod(&qp(&[1, 2])).unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn separable_associate_rational() {
        let f = qp(&[2, -3, 0, 1]);
        let sa = separable_associate(&f).unwrap().value().unwrap();
        assert_eq!(sa.h, qp(&[-2, 1, 1]));
        let one = &(&sa.r * &sa.h) + &(&sa.s * &sa.h.derivative());
        assert_eq!(one, qp(&[1]));
        let cube = qp(&[0, 0, 0, 1]);
        assert_eq!(separable_associate(&cube).unwrap().value().unwrap().h, qp(&[0, 1]));
    }

    #[test]
    fn multiplicity_and_bezout() {
        let q = qp(&[2, -3, 0, 1]);
        let (s, l) = root_multiplicity(&q, &Rational::one()).unwrap().value().unwrap();
        assert_eq!((s, l), (2, qp(&[2, 1])));
        let (hs, gs) = bezout_pair(&qp(&[-1, 1]), &qp(&[1, 1])).unwrap().value().unwrap();
        assert_eq!(hs, Poly::constant(Rationals, Rational::new(-1, 2)));
        assert_eq!(gs, Poly::constant(Rationals, Rational::new(1, 2)));
        let (hs, gs) = bezout_pair(&qp(&[0, 1]), &qp(&[1])).unwrap().value().unwrap();
        assert!(hs.is_zero());
        assert_eq!(gs, qp(&[1]));
    }

    #[test]
    fn egcd_zero_operand() {
        let f = qp(&[4, 2]);
        let e = egcd_branching(&f, &Poly::zero(Rationals)).unwrap().value().unwrap();
        assert_eq!(e.gcd, qp(&[2, 1]));
        assert_eq!(
            egcd_branching(&Poly::zero(Rationals), &Poly::zero(Rationals)).unwrap_err(),
            Error::BothZero
        );
    }

    fn monic(cs: Vec<i64>) -> Poly<Rationals> {
        let mut cs = cs;
        cs.push(1);
        qp(&cs)
    }

    fn separable(p: &Poly<Rationals>) -> bool {
        let e = egcd_branching(p, &p.derivative()).unwrap().value().unwrap();
        e.gcd.deg() == 0 && &(&e.u * &e.f1) + &(&e.v * &e.g1) == qp(&[1])
    }

    proptest! {
        #[test]
        fn divmod_is_exact(f in prop::collection::vec(-9i64..10, 0..8), d in prop::collection::vec(-9i64..10, 0..4)) {
            let f = qp(&f);
            let d = monic(d);
            let (q, r) = f.divmod(&d).unwrap();
            prop_assert_eq!(&(&q * &d) + &r, f);
            prop_assert!(r.is_zero() || r.deg() < d.deg());
        }

        #[test]
        fn factors_of_separable_are_separable(
            f in prop::collection::vec(-5i64..6, 1..4),
            g in prop::collection::vec(-5i64..6, 1..4),
        ) {
            let (f, g) = (monic(f), monic(g));
            let p = &f * &g;
            if separable(&p) {
                prop_assert!(separable(&f));
                prop_assert!(separable(&g));
            }
        }
    }
}
