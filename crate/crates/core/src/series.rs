//! Lazy, memoized power series over a tower and monic polynomials in `Y`
//! with series coefficients.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::scalars::Rational;
use crate::tower::{AlgElem, SplitOutcome, TPoly, Tower, TowerHom};
use crate::upoly::Poly;

type Generator = Box<dyn FnMut(usize, &[AlgElem]) -> AlgElem + Send>;

struct State {
    memo: Vec<AlgElem>,
    gen: Option<Generator>,
}

struct Node {
    owner: Arc<Tower>,
    known_zero_below: usize,
    /// Coefficients at or beyond this index vanish.
    bound: Option<usize>,
    state: Mutex<State>,
}

/// Power series in `T` whose coefficients are produced on demand.
#[derive(Clone)]
pub struct Series(Arc<Node>);

impl Series {
    /// Series driven by `f(k, previous)`, which receives the already known
    /// coefficients `0..k` of the series itself.
    pub fn from_fn(
        owner: &Arc<Tower>,
        known_zero_below: usize,
        bound: Option<usize>,
        f: impl FnMut(usize, &[AlgElem]) -> AlgElem + Send + 'static,
    ) -> Series {
        Series(Arc::new(Node {
            owner: owner.clone(),
            known_zero_below,
            bound,
            state: Mutex::new(State { memo: Vec::new(), gen: Some(Box::new(f)) }),
        }))
    }

    /// Finite series with the given coefficients.
    pub fn from_coeffs(owner: &Arc<Tower>, mut coeffs: Vec<AlgElem>) -> Series {
        while coeffs.last().is_some_and(AlgElem::is_zero) {
            coeffs.pop();
        }
        let kzb = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX);
        Series(Arc::new(Node {
            owner: owner.clone(),
            known_zero_below: kzb,
            bound: Some(coeffs.len()),
            state: Mutex::new(State { memo: coeffs, gen: None }),
        }))
    }

    pub fn from_rationals(owner: &Arc<Tower>, coeffs: &[Rational]) -> Series {
        Series::from_coeffs(owner, coeffs.iter().map(|c| owner.constant(c.clone())).collect())
    }

    pub fn zero(owner: &Arc<Tower>) -> Series {
        Series::from_coeffs(owner, Vec::new())
    }

    pub fn constant(c: AlgElem) -> Series {
        let owner = c.owner().clone();
        Series::from_coeffs(&owner, vec![c])
    }

    pub fn one(owner: &Arc<Tower>) -> Series {
        Series::constant(owner.one())
    }

    pub fn owner(&self) -> &Arc<Tower> {
        &self.0.owner
    }

    /// Certified lower bound on the order.
    pub fn known_zero_below(&self) -> usize {
        self.0.known_zero_below
    }

    /// Index past which every coefficient is known to vanish, if any.
    pub fn bound(&self) -> Option<usize> {
        self.0.bound
    }

    pub fn is_known_zero(&self) -> bool {
        self.0.bound.is_some_and(|b| b <= self.0.known_zero_below) || self.0.bound == Some(0)
    }

    fn vanishes_at(&self, j: usize) -> bool {
        j < self.0.known_zero_below || self.0.bound.is_some_and(|b| j >= b)
    }

    pub fn coeff_at(&self, j: usize) -> AlgElem {
        if self.vanishes_at(j) {
            return self.0.owner.zero();
        }
        let mut st = self.0.state.lock().unwrap();
        while st.memo.len() <= j {
            let k = st.memo.len();
            let State { memo, gen } = &mut *st;
            let c = match gen {
                Some(g) => {
                    if self.vanishes_at(k) {
                        self.0.owner.zero()
                    } else {
                        g(k, memo)
                    }
                }
                None => return self.0.owner.zero(),
            };
            memo.push(c);
        }
        st.memo[j].clone()
    }

    pub fn truncated(&self, n: usize) -> Vec<AlgElem> {
        (0..n).map(|j| self.coeff_at(j)).collect()
    }

    fn check(&self, o: &Series) -> Result<()> {
        if Tower::same(self.owner(), o.owner()) {
            Ok(())
        } else {
            Err(Error::OwnerMismatch)
        }
    }

    pub fn try_add(&self, o: &Series) -> Result<Series> {
        self.check(o)?;
        if self.is_known_zero() {
            return Ok(o.clone());
        }
        if o.is_known_zero() {
            return Ok(self.clone());
        }
        let (a, b) = (self.clone(), o.clone());
        let kzb = a.known_zero_below().min(b.known_zero_below());
        let bound = a.bound().zip(b.bound()).map(|(x, y)| x.max(y));
        Ok(Series::from_fn(self.owner(), kzb, bound, move |k, _| &a.coeff_at(k) + &b.coeff_at(k)))
    }

    pub fn try_sub(&self, o: &Series) -> Result<Series> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Series {
        if self.is_known_zero() {
            return self.clone();
        }
        let a = self.clone();
        Series::from_fn(self.owner(), a.known_zero_below(), a.bound(), move |k, _| -&a.coeff_at(k))
    }

    pub fn try_mul(&self, o: &Series) -> Result<Series> {
        self.check(o)?;
        if self.is_known_zero() || o.is_known_zero() {
            return Ok(Series::zero(self.owner()));
        }
        let (a, b) = (self.clone(), o.clone());
        let (za, zb) = (a.known_zero_below(), b.known_zero_below());
        let bound = a.bound().zip(b.bound()).map(|(x, y)| x + y - 1);
        let owner = self.owner().clone();
        Ok(Series::from_fn(self.owner(), za + zb, bound, move |k, _| {
            let mut acc = owner.zero();
            let lo = za.max(k.saturating_sub(b.bound().map_or(usize::MAX, |x| x.saturating_sub(1))));
            let hi = k.saturating_sub(zb).min(a.bound().map_or(usize::MAX, |x| x.saturating_sub(1)));
            if k < za + zb {
                return acc;
            }
            for i in lo..=hi {
                let x = a.coeff_at(i);
                if x.is_zero() {
                    continue;
                }
                let y = b.coeff_at(k - i);
                if !y.is_zero() {
                    acc = &acc + &(&x * &y);
                }
            }
            acc
        }))
    }

    pub fn scale(&self, c: &AlgElem) -> Series {
        if c.is_zero() || self.is_known_zero() {
            return Series::zero(self.owner());
        }
        let (a, c) = (self.clone(), c.clone());
        Series::from_fn(self.owner(), a.known_zero_below(), a.bound(), move |k, _| &a.coeff_at(k) * &c)
    }

    pub fn scale_rational(&self, r: &Rational) -> Series {
        self.scale(&self.owner().constant(r.clone()))
    }

    /// Multiplicative inverse; the constant term must be a unit as it stands.
    pub fn inverse(&self) -> Result<Series> {
        let a0 = self.coeff_at(0);
        let inv0 = match self.owner().invert_or_split(&a0) {
            SplitOutcome::Value(Some(i)) => i,
            _ => return Err(Error::NonUnitConstantTerm),
        };
        let a = self.clone();
        let owner = self.owner().clone();
        Ok(Series::from_fn(self.owner(), 0, None, move |k, prev| {
            if k == 0 {
                return inv0.clone();
            }
            let mut acc = owner.zero();
            for i in 1..=k {
                let x = a.coeff_at(i);
                if !x.is_zero() {
                    acc = &acc + &(&x * &prev[k - i]);
                }
            }
            -&(&acc * &inv0)
        }))
    }

    /// `a(T^m)`.
    pub fn ramify(&self, m: usize) -> Series {
        assert!(m >= 1, "ramification index must be positive");
        if m == 1 || self.is_known_zero() {
            return self.clone();
        }
        let a = self.clone();
        let owner = self.owner().clone();
        let bound = a.bound().map(|b| (b.max(1) - 1) * m + 1);
        Series::from_fn(self.owner(), a.known_zero_below().saturating_mul(m), bound, move |k, _| {
            if k % m == 0 {
                a.coeff_at(k / m)
            } else {
                owner.zero()
            }
        })
    }

    /// `T^e · a`.
    pub fn mul_t_power(&self, e: usize) -> Series {
        if e == 0 || self.is_known_zero() {
            return self.clone();
        }
        let a = self.clone();
        let bound = a.bound().map(|b| b + e);
        Series::from_fn(self.owner(), a.known_zero_below() + e, bound, move |k, _| a.coeff_at(k - e))
    }

    /// `T^(-e) · a`; the caller guarantees the low coefficients vanish.
    pub fn div_t_power(&self, e: usize) -> Series {
        if e == 0 || self.is_known_zero() {
            return self.clone();
        }
        let a = self.clone();
        let bound = a.bound().map(|b| b.saturating_sub(e));
        Series::from_fn(self.owner(), a.known_zero_below().saturating_sub(e), bound, move |k, _| {
            a.coeff_at(k + e)
        })
    }

    /// Image in a refinement (possibly extended) of the owner.
    pub fn project(&self, target: &Arc<Tower>) -> Series {
        if Arc::ptr_eq(self.owner(), target) {
            return self.clone();
        }
        let a = self.clone();
        let t = target.clone();
        Series::from_fn(target, a.known_zero_below(), a.bound(), move |k, _| a.coeff_at(k).project_to(&t))
    }

    /// Coefficientwise image under an algebra homomorphism.
    pub fn map_hom(&self, h: &TowerHom) -> Series {
        let a = self.clone();
        let h = h.clone();
        Series::from_fn(&h.target.clone(), a.known_zero_below(), a.bound(), move |k, _| h.apply(&a.coeff_at(k)))
    }

    /// Truncated rendering with an explicit continuation marker.
    pub fn render(&self, order: usize, var: &str) -> String {
        let names = self.owner().names();
        let mut out = String::new();
        for j in 0..order {
            let c = self.coeff_at(j);
            if c.is_zero() {
                continue;
            }
            let body = c.render_with(&names);
            let mono = match j {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{j}"),
            };
            let term = if mono.is_empty() {
                format!("({body})")
            } else {
                format!("({body})*{mono}")
            };
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(" + …");
        out
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(6, "T"))
    }
}

impl std::ops::Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        self.try_add(o).expect("tower mismatch")
    }
}

impl std::ops::Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self.try_sub(o).expect("tower mismatch")
    }
}

impl std::ops::Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        self.try_mul(o).expect("tower mismatch")
    }
}

impl std::ops::Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

pub fn series_add(a: &Series, b: &Series) -> Result<Series> {
    a.try_add(b)
}

pub fn series_mul(a: &Series, b: &Series) -> Result<Series> {
    a.try_mul(b)
}

pub fn series_neg(a: &Series) -> Series {
    a.neg()
}

pub fn series_inverse(a: &Series) -> Result<Series> {
    a.inverse()
}

/// Monic `Y^n + Σ α_i(T) Y^(n-i)`; `coeffs[i]` is `α_i`, `coeffs[0] = 1`.
#[derive(Clone)]
pub struct SeriesPoly {
    owner: Arc<Tower>,
    coeffs: Vec<Series>,
}

impl SeriesPoly {
    /// Monic polynomial from its non-leading coefficients `α_1..α_n`.
    pub fn monic(owner: &Arc<Tower>, tail: Vec<Series>) -> SeriesPoly {
        let mut coeffs = vec![Series::one(owner)];
        coeffs.extend(tail);
        SeriesPoly { owner: owner.clone(), coeffs }
    }

    /// From rows of rationals: `rows[i][j]` is the `T^j` coefficient of `α_i`, `i ≥ 1`.
    pub fn from_rational_rows(rows: &[Vec<Rational>]) -> SeriesPoly {
        let base = Tower::base();
        let tail = rows.iter().map(|r| Series::from_rationals(&base, r)).collect();
        SeriesPoly::monic(&base, tail)
    }

    /// `Y - η`.
    pub fn linear(eta: &Series) -> SeriesPoly {
        SeriesPoly::monic(eta.owner(), vec![eta.neg()])
    }

    /// Monic polynomial with constant coefficients.
    pub fn from_poly(p: &TPoly) -> SeriesPoly {
        assert!(p.is_monic(), "polynomial must be monic");
        let owner = p.ring().clone();
        let n = p.deg();
        let tail = (1..=n).map(|i| Series::constant(p.coeff(n - i))).collect();
        SeriesPoly::monic(&owner, tail)
    }

    pub fn owner(&self) -> &Arc<Tower> {
        &self.owner
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn alpha(&self, i: usize) -> &Series {
        &self.coeffs[i]
    }

    pub fn alphas(&self) -> &[Series] {
        &self.coeffs
    }

    /// The `T^q` coefficient as a polynomial in `Y`.
    pub fn x_coeff(&self, q: usize) -> TPoly {
        let n = self.degree();
        let coeffs = (0..=n).map(|k| self.coeffs[n - k].coeff_at(q)).collect();
        Poly::new(self.owner.clone(), coeffs)
    }

    pub fn map_coeffs(&self, owner: &Arc<Tower>, f: impl Fn(&Series) -> Series) -> SeriesPoly {
        let tail = self.coeffs[1..].iter().map(f).collect();
        SeriesPoly::monic(owner, tail)
    }

    pub fn project(&self, target: &Arc<Tower>) -> SeriesPoly {
        if Arc::ptr_eq(&self.owner, target) {
            return self.clone();
        }
        self.map_coeffs(target, |s| s.project(target))
    }

    pub fn map_hom(&self, h: &TowerHom) -> SeriesPoly {
        self.map_coeffs(&h.target, |s| s.map_hom(h))
    }

    /// `F(T^m, Y)`.
    pub fn substitute_ramify(&self, m: usize) -> SeriesPoly {
        self.map_coeffs(&self.owner, |s| s.ramify(m))
    }

    /// `T^(-np) F(T^m, T^p Z)`, checking the vanishing the slope promises.
    pub fn segment_substitute(&self, m: usize, p: usize) -> Result<SeriesPoly> {
        let n = self.degree();
        let mut tail = Vec::with_capacity(n);
        for i in 1..=n {
            let a = &self.coeffs[i];
            let shift = i * p;
            for j in 0..shift.div_ceil(m) {
                if j * m < shift && !a.coeff_at(j).is_zero() {
                    return Err(Error::SlopeViolation { index: i, order: j });
                }
            }
            tail.push(a.ramify(m).div_t_power(shift));
        }
        Ok(SeriesPoly::monic(&self.owner, tail))
    }

    /// `T^(lp) G(T, Y/T^p)` for a monic `G` of degree `l`.
    pub fn unsegment_factor(&self, p: usize) -> SeriesPoly {
        let tail = self.coeffs[1..].iter().enumerate().map(|(i, s)| s.mul_t_power((i + 1) * p)).collect();
        SeriesPoly::monic(&self.owner, tail)
    }

    /// `F(Y + t)`.
    pub fn translate(&self, t: &Series) -> SeriesPoly {
        if t.is_known_zero() {
            return self.clone();
        }
        let n = self.degree();
        let mut powers = vec![Series::one(&self.owner)];
        for e in 1..=n {
            powers.push(&powers[e - 1] * t);
        }
        // coefficient of Y^j in Σ_k P_k (Y + t)^k is Σ_{k ≥ j} C(k, j) P_k t^(k-j)
        let pk = |k: usize| &self.coeffs[n - k];
        let mut tail = Vec::with_capacity(n);
        for j in (0..n).rev() {
            let mut acc = Series::zero(&self.owner);
            let mut binom = Rational::one();
            for k in j..=n {
                if k > j {
                    binom = &(&binom * &Rational::from_int(k as i64)) * &Rational::new(1, (k - j) as i64);
                }
                let term = (pk(k) * &powers[k - j]).scale_rational(&binom);
                acc = &acc + &term;
            }
            tail.push(acc);
        }
        SeriesPoly::monic(&self.owner, tail)
    }

    /// Product of monic polynomials, coefficientwise lazy.
    pub fn product(&self, o: &SeriesPoly) -> SeriesPoly {
        let (n, m) = (self.degree(), o.degree());
        let tail = (1..=n + m)
            .map(|k| {
                let mut acc = Series::zero(&self.owner);
                for i in k.saturating_sub(m)..=k.min(n) {
                    acc = &acc + &(&self.coeffs[i] * &o.coeffs[k - i]);
                }
                acc
            })
            .collect();
        SeriesPoly::monic(&self.owner, tail)
    }

    /// Rows `α_i(0..order)` for `i = 0..=n`.
    pub fn truncated_rows(&self, order: usize) -> Vec<Vec<AlgElem>> {
        self.coeffs.iter().map(|s| s.truncated(order)).collect()
    }

    pub fn render(&self, order: usize, var: &str) -> String {
        let n = self.degree();
        let mut parts = vec![format!("Y^{n}")];
        for (i, s) in self.coeffs.iter().enumerate().skip(1) {
            let body = s.render(order, var);
            if body != "0 + …" {
                let k = n - i;
                let y = match k {
                    0 => String::new(),
                    1 => "*Y".into(),
                    _ => format!("*Y^{k}"),
                };
                parts.push(format!("[{body}]{y}"));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(6, "T"))
    }
}

pub fn substitute_ramify(f: &SeriesPoly, m: usize) -> SeriesPoly {
    f.substitute_ramify(m)
}

pub fn segment_substitute(f: &SeriesPoly, m: usize, p: usize) -> Result<SeriesPoly> {
    f.segment_substitute(m, p)
}

pub fn unsegment_factor(g: &SeriesPoly, p: usize) -> SeriesPoly {
    g.unsegment_factor(p)
}

/// Smallest order `ℓ ≤ fuel` at which `α_n` or `α_(n-1)` has a unit
/// coefficient; returns `(k, ℓ)`. Zero divisors split the tower.
pub fn first_unit_coefficient(f: &SeriesPoly, fuel: usize) -> Result<SplitOutcome<(usize, usize)>> {
    let n = f.degree();
    if n < 2 {
        return Err(Error::PreconditionViolation("degree below 2".into()));
    }
    for l in 0..=fuel {
        for k in [n, n - 1] {
            match f.owner().invert_or_split(&f.alpha(k).coeff_at(l)) {
                SplitOutcome::Value(Some(_)) => return Ok(SplitOutcome::Value((k, l))),
                SplitOutcome::Value(None) => {}
                SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
            }
        }
    }
    Err(Error::FuelExhausted(fuel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn rs(cs: &[i64]) -> Series {
        Series::from_rationals(&Tower::base(), &cs.iter().map(|&c| q(c, 1)).collect::<Vec<_>>())
    }

    fn vals(s: &Series, n: usize) -> Vec<Rational> {
        s.truncated(n).iter().map(|c| c.as_rational().unwrap().clone()).collect()
    }

    fn geometric() -> Series {
        let base = Tower::base();
        let b = base.clone();
        Series::from_fn(&base, 0, None, move |_, _| b.one())
    }

    #[test]
    fn products_and_inverse() {
        let p = &rs(&[1, 1]) * &rs(&[1, -1]);
        assert_eq!(vals(&p, 5), vec![q(1, 1), q(0, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        let t = &geometric() * &rs(&[1, -1]);
        assert_eq!(vals(&t, 6), vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let inv = rs(&[1, -1]).inverse().unwrap();
        assert_eq!(vals(&inv, 4), vec![q(1, 1); 4]);
        let base = Tower::base();
        let s = Series::from_rationals(&base, &[q(1, 1), q(1, 2), q(-1, 8)]);
        assert_eq!(vals(&s.inverse().unwrap(), 3), vec![q(1, 1), q(-1, 2), q(3, 8)]);
        assert_eq!(rs(&[0, 1]).inverse().unwrap_err(), Error::NonUnitConstantTerm);
    }

    #[test]
    fn segment_and_unsegment() {
        let f = SeriesPoly::from_rational_rows(&[vec![], vec![q(0, 1), q(0, 1), q(0, 1), q(-1, 1)]]);
        let v = f.segment_substitute(2, 3).unwrap();
        assert_eq!(vals(v.alpha(2), 3), vec![q(-1, 1), q(0, 1), q(0, 1)]);
        let back = v.unsegment_factor(3);
        assert_eq!(vals(back.alpha(2), 7)[6], q(-1, 1));
        let bad = SeriesPoly::from_rational_rows(&[vec![], vec![q(0, 1), q(1, 1)]]);
        assert!(matches!(bad.segment_substitute(2, 3), Err(Error::SlopeViolation { .. })));
    }

    #[test]
    fn translate_kills_subleading_term() {
        // Y^2 + 2XY + X^3 -> W^2 + X^3 - X^2
        let f = SeriesPoly::from_rational_rows(&[vec![q(0, 1), q(2, 1)], vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)]]);
        let shift = f.alpha(1).scale_rational(&q(-1, 2));
        let g = f.translate(&shift);
        assert!(vals(g.alpha(1), 6).iter().all(Rational::is_zero));
        assert_eq!(vals(g.alpha(2), 4), vec![q(0, 1), q(0, 1), q(-1, 1), q(1, 1)]);
    }

    #[test]
    fn first_unit_examples() {
        let f = SeriesPoly::from_rational_rows(&[vec![], vec![q(0, 1), q(-1, 1)]]);
        assert_eq!(first_unit_coefficient(&f, 10).unwrap().value(), Some((2, 1)));
        let f = SeriesPoly::from_rational_rows(&[
            vec![],
            vec![q(-3, 1)],
            vec![q(0, 1), q(1, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ]);
        assert_eq!(first_unit_coefficient(&f, 10).unwrap().value(), Some((3, 1)));
        let y2 = SeriesPoly::from_rational_rows(&[vec![], vec![]]);
        assert_eq!(first_unit_coefficient(&y2, 5).unwrap_err(), Error::FuelExhausted(5));
    }

    fn arb_series() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-4i64..5, 0..8)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn ring_laws_to_order_20(a in arb_series(), b in arb_series(), c in arb_series()) {
            let (a, b, c) = (rs(&a), rs(&b), rs(&c));
            let g = geometric();
            prop_assert_eq!((&(&a * &b) * &g).truncated(20), (&a * &(&b * &g)).truncated(20));
            prop_assert_eq!((&a * &g).truncated(20), (&g * &a).truncated(20));
            prop_assert_eq!((&(&a + &b) * &c).truncated(20), (&(&a * &c) + &(&b * &c)).truncated(20));
        }

        #[test]
        fn memo_order_does_not_matter(a in arb_series(), order in Just((0..20usize).collect::<Vec<_>>()).prop_shuffle()) {
            let make = || &(&rs(&a) * &geometric()) + &rs(&[1, 1]).inverse().unwrap();
            let shuffled = make();
            let mut seen = vec![None; 20];
            for j in order {
                seen[j] = Some(shuffled.coeff_at(j));
            }
            let fresh = make().truncated(20);
            prop_assert_eq!(seen.into_iter().map(Option::unwrap).collect::<Vec<_>>(), fresh);
        }

        #[test]
        fn ramify_is_a_homomorphism(a in arb_series(), b in arb_series(), m in 1usize..4) {
            let (a, b) = (rs(&a), rs(&b));
            prop_assert_eq!((&a + &b).ramify(m).truncated(20), (&a.ramify(m) + &b.ramify(m)).truncated(20));
            prop_assert_eq!((&a * &b).ramify(m).truncated(20), (&a.ramify(m) * &b.ramify(m)).truncated(20));
        }

        #[test]
        fn segment_round_trip(
            rows in prop::collection::vec(prop::collection::vec(-3i64..4, 0..4), 1..4),
            m in 1usize..4,
            p in 0usize..4,
        ) {
            let n = rows.len();
            let shifted: Vec<Vec<Rational>> = rows
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let i = k + 1;
                    let lowest = (i * p).div_ceil(m);
                    let mut row = vec![q(0, 1); lowest];
                    row.extend(r.iter().map(|&c| q(c, 1)));
                    row
                })
                .collect();
            let f = SeriesPoly::from_rational_rows(&shifted);
            let v = f.segment_substitute(m, p).unwrap();
            let back = v.unsegment_factor(p);
            let expected = f.substitute_ramify(m);
            for i in 1..=n {
                prop_assert_eq!(back.alpha(i).truncated(20), expected.alpha(i).truncated(20));
            }
        }
    }
}
