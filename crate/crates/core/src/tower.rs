//! Triangular separable algebras over the rationals.
//!
//! A tower is a chain of levels; level `k` adjoins a root of a monic
//! separable polynomial with coefficients in the tower below it. Elements are
//! stored densely in the monomial basis with the first generator varying
//! fastest, so an element of a prefix tower embeds by zero padding.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{Rational, Rationals, Ring};
use crate::upoly::{egcd_branching, Poly};

pub type TPoly = Poly<Arc<Tower>>;

/// Either a value valid on the whole tower, or the quotients the tower had
/// to be cut into before a value could be produced.
#[derive(Clone, Debug)]
pub enum SplitOutcome<V> {
    Value(V),
    Split(Vec<Part>),
}

impl<V> SplitOutcome<V> {
    pub fn value(self) -> Option<V> {
        match self {
            SplitOutcome::Value(v) => Some(v),
            SplitOutcome::Split(_) => None,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, SplitOutcome::Split(_))
    }

    pub fn map<W>(self, f: impl FnOnce(V) -> W) -> SplitOutcome<W> {
        match self {
            SplitOutcome::Value(v) => SplitOutcome::Value(f(v)),
            SplitOutcome::Split(p) => SplitOutcome::Split(p),
        }
    }
}

/// One quotient of a split, with the idempotent of the source that is 1 on it.
#[derive(Clone, Debug)]
pub struct Part {
    pub projection: TowerHom,
    pub tower: Arc<Tower>,
    pub idempotent: AlgElem,
}

/// Rings in which a zero test may force a decomposition.
pub trait SplittingRing: Ring {
    fn invert_or_split(&self, x: &Self::Elem) -> SplitOutcome<Option<Self::Elem>>;
}

impl SplittingRing for Rationals {
    fn invert_or_split(&self, x: &Rational) -> SplitOutcome<Option<Rational>> {
        SplitOutcome::Value(x.inv().ok())
    }
}

#[derive(Clone)]
struct Level {
    name: String,
    degree: usize,
    min_poly: TPoly,
    cert_r: TPoly,
    cert_s: TPoly,
    /// Non-leading coefficients of `min_poly`, `None` when zero.
    raw: Vec<Option<Vec<Rational>>>,
}

pub struct Tower {
    parent: Option<Arc<Tower>>,
    level: Option<Level>,
    depth: usize,
    dim: usize,
}

fn is_zero_slice(x: &[Rational]) -> bool {
    x.iter().all(Rational::is_zero)
}

fn add_into(acc: &mut Option<Vec<Rational>>, t: Vec<Rational>) {
    match acc {
        Some(a) => a.iter_mut().zip(&t).for_each(|(x, y)| *x += y),
        None => *acc = Some(t),
    }
}

fn sub_into(acc: &mut Option<Vec<Rational>>, t: Vec<Rational>) {
    match acc {
        Some(a) => a.iter_mut().zip(&t).for_each(|(x, y)| *x -= y),
        None => *acc = Some(t.into_iter().map(|x| -x).collect()),
    }
}

impl Tower {
    /// The base field as a tower with no levels.
    pub fn base() -> Arc<Tower> {
        Arc::new(Tower { parent: None, level: None, depth: 0, dim: 1 })
    }

    /// Adjoins a level whose certificate `r·p + s·p' = 1` is already known.
    pub fn extend_certified(parent: &Arc<Tower>, p: &TPoly, r: &TPoly, s: &TPoly, name: &str) -> Result<Arc<Tower>> {
        if p.is_constant() {
            return Err(Error::Constant);
        }
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        let one = &(&(r * p) + &(s * &p.derivative()));
        if !(one.deg() == 0 && one.is_monic()) {
            return Err(Error::NotSeparable(p.render(name)));
        }
        Ok(Tower::extend_unchecked(parent, p.clone(), r.clone(), s.clone(), name))
    }

    fn extend_unchecked(parent: &Arc<Tower>, p: TPoly, r: TPoly, s: TPoly, name: &str) -> Arc<Tower> {
        let degree = p.deg();
        let raw = p.coeffs()[..degree]
            .iter()
            .map(|c| if c.is_zero() { None } else { Some(c.data.clone()) })
            .collect();
        let level = Level { name: name.to_string(), degree, min_poly: p, cert_r: r, cert_s: s, raw };
        Arc::new(Tower {
            parent: Some(parent.clone()),
            level: Some(level),
            depth: parent.depth + 1,
            dim: parent.dim * degree,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn parent(&self) -> Option<&Arc<Tower>> {
        self.parent.as_ref()
    }

    /// Degree of the top level (1 for the base field).
    pub fn top_degree(&self) -> usize {
        self.level.as_ref().map_or(1, |l| l.degree)
    }

    pub fn top_name(&self) -> Option<&str> {
        self.level.as_ref().map(|l| l.name.as_str())
    }

    /// Defining polynomial of the top level, over the parent.
    pub fn top_min_poly(&self) -> Option<&TPoly> {
        self.level.as_ref().map(|l| &l.min_poly)
    }

    pub fn top_certificate(&self) -> Option<(&TPoly, &TPoly)> {
        self.level.as_ref().map(|l| (&l.cert_r, &l.cert_s))
    }

    /// The sub-tower made of the first `k` levels.
    pub fn prefix(self: &Arc<Self>, k: usize) -> Arc<Tower> {
        assert!(k <= self.depth, "prefix longer than tower");
        let mut t = self.clone();
        while t.depth > k {
            t = t.parent.clone().unwrap();
        }
        t
    }

    /// Degrees of all levels, bottom first.
    pub fn degrees(self: &Arc<Self>) -> Vec<usize> {
        (1..=self.depth).map(|k| self.prefix(k).top_degree()).collect()
    }

    pub fn names(self: &Arc<Self>) -> Vec<String> {
        (1..=self.depth).map(|k| self.prefix(k).top_name().unwrap().to_string()).collect()
    }

    /// Defining polynomial of level `k` (0-based) over `prefix(k)`.
    pub fn min_poly(self: &Arc<Self>, k: usize) -> TPoly {
        self.prefix(k + 1).top_min_poly().unwrap().clone()
    }

    pub fn zero(self: &Arc<Self>) -> AlgElem {
        AlgElem { owner: self.clone(), data: vec![Rational::zero(); self.dim] }
    }

    pub fn one(self: &Arc<Self>) -> AlgElem {
        self.constant(Rational::one())
    }

    pub fn constant(self: &Arc<Self>, r: Rational) -> AlgElem {
        let mut data = vec![Rational::zero(); self.dim];
        data[0] = r;
        AlgElem { owner: self.clone(), data }
    }

    pub fn int(self: &Arc<Self>, n: i64) -> AlgElem {
        self.constant(Rational::from_int(n))
    }

    pub fn from_data(self: &Arc<Self>, data: Vec<Rational>) -> AlgElem {
        assert_eq!(data.len(), self.dim, "coordinate vector has wrong length");
        AlgElem { owner: self.clone(), data }
    }

    /// Generator `k` (0-based), reduced: a degree-1 level yields its value.
    pub fn generator(self: &Arc<Self>, k: usize) -> AlgElem {
        let sub = self.prefix(k + 1);
        let lv = sub.level.as_ref().unwrap();
        let par = sub.parent.as_ref().unwrap();
        let g = if lv.degree == 1 {
            let c = lv.min_poly.coeff(0);
            let mut data = vec![Rational::zero(); sub.dim];
            for (i, x) in c.data.iter().enumerate() {
                data[i] = -x;
            }
            AlgElem { owner: sub.clone(), data }
        } else {
            let mut data = vec![Rational::zero(); sub.dim];
            data[par.dim] = Rational::one();
            AlgElem { owner: sub.clone(), data }
        };
        g.project_to(self)
    }

    pub fn generators(self: &Arc<Self>) -> Vec<AlgElem> {
        (0..self.depth).map(|k| self.generator(k)).collect()
    }

    /// Structural equality of the defining data, ignoring names.
    pub fn same(a: &Arc<Tower>, b: &Arc<Tower>) -> bool {
        if Arc::ptr_eq(a, b) {
            return true;
        }
        if a.depth != b.depth || a.dim != b.dim {
            return false;
        }
        match (&a.level, &b.level, &a.parent, &b.parent) {
            (Some(la), Some(lb), Some(pa), Some(pb)) => {
                la.degree == lb.degree && Tower::same(pa, pb) && la.raw == lb.raw
            }
            _ => true,
        }
    }

    fn mul_raw(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let (par, lv) = match (&self.parent, &self.level) {
            (Some(p), Some(l)) => (p, l),
            _ => return vec![&x[0] * &y[0]],
        };
        if is_zero_slice(&x[1..]) {
            return y.iter().map(|c| c * &x[0]).collect();
        }
        if is_zero_slice(&y[1..]) {
            return x.iter().map(|c| c * &y[0]).collect();
        }
        let pd = par.dim;
        let d = lv.degree;
        let chunks = |v: &'_ [Rational]| -> Vec<Option<Vec<Rational>>> {
            v.chunks(pd).map(|c| if is_zero_slice(c) { None } else { Some(c.to_vec()) }).collect()
        };
        let xs = chunks(x);
        let ys = chunks(y);
        let mut prod: Vec<Option<Vec<Rational>>> = vec![None; 2 * d - 1];
        for (i, xi) in xs.iter().enumerate() {
            let Some(xi) = xi else { continue };
            for (j, yj) in ys.iter().enumerate() {
                let Some(yj) = yj else { continue };
                add_into(&mut prod[i + j], par.mul_raw(xi, yj));
            }
        }
        self.reduce_chunks(prod)
    }

    /// Reduces a polynomial in the top generator (coefficients over the
    /// parent, any length) modulo the top defining polynomial.
    fn reduce_chunks(&self, mut prod: Vec<Option<Vec<Rational>>>) -> Vec<Rational> {
        let (par, lv) = match (&self.parent, &self.level) {
            (Some(p), Some(l)) => (p, l),
            _ => {
                let mut v = prod.into_iter().next().flatten().unwrap_or_else(|| vec![Rational::zero()]);
                v.truncate(1);
                return v;
            }
        };
        let d = lv.degree;
        for k in (d..prod.len()).rev() {
            let Some(c) = prod[k].take() else { continue };
            if is_zero_slice(&c) {
                continue;
            }
            for (j, pj) in lv.raw.iter().enumerate() {
                if let Some(pj) = pj {
                    sub_into(&mut prod[k - d + j], par.mul_raw(&c, pj));
                }
            }
        }
        let mut out = Vec::with_capacity(self.dim);
        for k in 0..d {
            match prod.get_mut(k).and_then(Option::take) {
                Some(c) => out.extend(c),
                None => out.extend(std::iter::repeat_n(Rational::zero(), par.dim)),
            }
        }
        out
    }

    /// Element whose representation in the top generator is `coeffs`.
    pub fn from_top_poly(self: &Arc<Self>, coeffs: &[AlgElem]) -> AlgElem {
        let chunks = coeffs.iter().map(|c| if c.is_zero() { None } else { Some(c.data.clone()) }).collect();
        AlgElem { owner: self.clone(), data: self.reduce_chunks(chunks) }
    }

    fn project_raw(src: &Arc<Tower>, dst: &Arc<Tower>, data: &[Rational]) -> Vec<Rational> {
        if Arc::ptr_eq(src, dst) {
            return data.to_vec();
        }
        let (Some(sp), Some(dp)) = (&src.parent, &dst.parent) else {
            return data.to_vec();
        };
        let chunks = data
            .chunks(sp.dim)
            .map(|c| if is_zero_slice(c) { None } else { Some(Tower::project_raw(sp, dp, c)) })
            .collect();
        dst.reduce_chunks(chunks)
    }

    fn lift_raw(src: &Arc<Tower>, dst: &Arc<Tower>, data: &[Rational]) -> Vec<Rational> {
        if Arc::ptr_eq(src, dst) {
            return data.to_vec();
        }
        let (Some(sp), Some(dp)) = (&src.parent, &dst.parent) else {
            return data.to_vec();
        };
        let mut out = vec![Rational::zero(); dst.dim];
        for (i, c) in data.chunks(sp.dim).enumerate() {
            if !is_zero_slice(c) {
                let l = Tower::lift_raw(sp, dp, c);
                out[i * dp.dim..(i + 1) * dp.dim].clone_from_slice(&l);
            }
        }
        out
    }

    /// Top-level representation of `x` as a polynomial over the parent.
    pub fn top_poly(self: &Arc<Self>, x: &AlgElem) -> TPoly {
        let par = self.parent.clone().expect("base field has no top generator");
        let coeffs = x.data.chunks(par.dim).map(|c| par.from_data(c.to_vec())).collect();
        Poly::new(par, coeffs)
    }

    /// Zero test with dynamic splitting; see [`SplittingRing`].
    pub fn invert_or_split(self: &Arc<Self>, x: &AlgElem) -> SplitOutcome<Option<AlgElem>> {
        self.check(x);
        if x.is_zero() {
            return SplitOutcome::Value(None);
        }
        let (par, lv) = match (&self.parent, &self.level) {
            (Some(p), Some(l)) => (p, l),
            _ => return SplitOutcome::Value(Some(self.constant(x.data[0].inv().unwrap()))),
        };
        let q = self.top_poly(x);
        if q.deg() == 0 {
            return match par.invert_or_split(&q.coeffs()[0]) {
                SplitOutcome::Value(Some(inv)) => SplitOutcome::Value(Some(inv.project_to(self))),
                SplitOutcome::Value(None) => unreachable!("nonzero constant tested zero"),
                SplitOutcome::Split(parts) => SplitOutcome::Split(self.lift_parts(parts)),
            };
        }
        match egcd_branching(&lv.min_poly, &q).expect("gcd of nonzero polynomials") {
            SplitOutcome::Split(parts) => SplitOutcome::Split(self.lift_parts(parts)),
            SplitOutcome::Value(e) => {
                if e.gcd.deg() == 0 {
                    SplitOutcome::Value(Some(self.from_top_poly(e.v.coeffs())))
                } else {
                    SplitOutcome::Split(self.split_top(&e.gcd))
                }
            }
        }
    }

    /// Carries a split of the parent up through the top level.
    fn lift_parts(self: &Arc<Self>, parts: Vec<Part>) -> Vec<Part> {
        let lv = self.level.as_ref().unwrap();
        parts
            .into_iter()
            .map(|part| {
                let p = project_poly(&lv.min_poly, &part.tower);
                let r = project_poly(&lv.cert_r, &part.tower);
                let s = project_poly(&lv.cert_s, &part.tower);
                let tower = Tower::extend_unchecked(&part.tower, p, r, s, &lv.name);
                let idempotent = part.idempotent.project_to(self);
                let projection = TowerHom::projection(self, &tower);
                Part { projection, tower, idempotent }
            })
            .collect()
    }

    /// Splits the top level along a proper monic factor `g` of its polynomial.
    /// The part where `g` vanishes comes first.
    fn split_top(self: &Arc<Self>, g: &TPoly) -> Vec<Part> {
        let lv = self.level.as_ref().unwrap();
        let par = self.parent.as_ref().unwrap();
        let p = &lv.min_poly;
        let f = p.exact_div(g).expect("gcd divides the defining polynomial");
        let (r, s) = (&lv.cert_r, &lv.cert_s);
        let cert = |g: &TPoly, f: &TPoly| -> (TPoly, TPoly) {
            // (r f + s f') g + (s f) g' = 1, then shrink s f modulo g
            let a = &(r * f) + &(s * &f.derivative());
            let b = s * f;
            let (k, b2) = b.divmod(g).unwrap();
            let a2 = &a + &(&k * &g.derivative());
            (a2, b2)
        };
        let (rg, sg) = cert(g, &f);
        let (rf, sf) = cert(&f, g);
        let e_g = self.from_top_poly((&(s * &g.derivative()) * &f).rem(p).unwrap().coeffs());
        let e_f = &self.one() - &e_g;
        let tg = Tower::extend_unchecked(par, g.clone(), rg, sg, &lv.name);
        let tf = Tower::extend_unchecked(par, f, rf, sf, &lv.name);
        [(tg, e_g), (tf, e_f)]
            .into_iter()
            .map(|(tower, idempotent)| Part { projection: TowerHom::projection(self, &tower), tower, idempotent })
            .collect()
    }

    fn check(self: &Arc<Self>, x: &AlgElem) {
        assert!(Tower::same(self, &x.owner), "element belongs to another tower");
    }

    /// Quasi-inverse `b` with `x b x = x` and `b x b = b`.
    pub fn quasi_inverse(self: &Arc<Self>, x: &AlgElem) -> AlgElem {
        match self.invert_or_split(x) {
            SplitOutcome::Value(Some(y)) => y,
            SplitOutcome::Value(None) => self.zero(),
            SplitOutcome::Split(parts) => {
                let mut acc = self.zero();
                for part in parts {
                    let b = part.tower.quasi_inverse(&x.project_to(&part.tower));
                    acc = &acc + &(&part.idempotent * &b.lift_to(self));
                }
                acc
            }
        }
    }

    /// Leaves of the split tree of `x`: each leaf with its composed
    /// idempotent and whether `x` is a unit there.
    pub fn zero_unit_leaves(self: &Arc<Self>, x: &AlgElem) -> Vec<(Part, bool)> {
        match self.invert_or_split(x) {
            SplitOutcome::Value(v) => {
                let part = Part {
                    projection: TowerHom::identity(self),
                    tower: self.clone(),
                    idempotent: self.one(),
                };
                vec![(part, v.is_some())]
            }
            SplitOutcome::Split(parts) => {
                let mut out = Vec::new();
                for part in parts {
                    for (leaf, unit) in part.tower.zero_unit_leaves(&x.project_to(&part.tower)) {
                        let idempotent = &leaf.idempotent.lift_to(self) * &part.idempotent;
                        let projection = TowerHom::projection(self, &leaf.tower);
                        out.push((Part { projection, tower: leaf.tower, idempotent }, unit));
                    }
                }
                out
            }
        }
    }

    /// Splits along an idempotent `e`: quotients where `e = 1` and where `e = 0`.
    pub fn decompose_by_idempotent(self: &Arc<Self>, e: &AlgElem) -> Result<IdempotentSplit> {
        self.check(e);
        if &(e * e) != e {
            return Err(Error::NotIdempotent);
        }
        if e.is_zero() || e.is_one() {
            return Err(Error::TrivialIdempotent);
        }
        let mut out = IdempotentSplit { unit_parts: Vec::new(), zero_parts: Vec::new() };
        for (part, unit) in self.zero_unit_leaves(e) {
            if unit {
                out.unit_parts.push(part);
            } else {
                out.zero_parts.push(part);
            }
        }
        Ok(out)
    }

    /// Adjoins a root of `p`; the separability certificate is computed
    /// here and may itself require splitting `self` first.
    pub fn adjoin_root(self: &Arc<Self>, p: &TPoly, name: &str) -> Result<SplitOutcome<Arc<Tower>>> {
        if p.is_constant() {
            return Err(Error::Constant);
        }
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        match egcd_branching(p, &p.derivative())? {
            SplitOutcome::Split(parts) => Ok(SplitOutcome::Split(parts)),
            SplitOutcome::Value(e) if e.gcd.deg() == 0 => {
                Ok(SplitOutcome::Value(Tower::extend_unchecked(self, p.clone(), e.u, e.v, name)))
            }
            SplitOutcome::Value(_) => Err(Error::NotSeparable(p.render(name))),
        }
    }

    /// Drops degree-1 levels, substituting their values upward.
    pub fn prune(self: &Arc<Self>) -> (Arc<Tower>, TowerHom) {
        let mut cur = Tower::base();
        let mut images: Vec<AlgElem> = Vec::new();
        for k in 0..self.depth {
            let sub = self.prefix(k + 1);
            let lv = sub.level.as_ref().unwrap();
            let partial = TowerHom { source: self.prefix(k), target: cur.clone(), images: images.clone() };
            let map = |p: &TPoly| p.map(cur.clone(), |c| partial.apply(c));
            if lv.degree == 1 {
                let v = -&partial.apply(&lv.min_poly.coeff(0));
                images.push(v);
            } else {
                let next = Tower::extend_unchecked(&cur, map(&lv.min_poly), map(&lv.cert_r), map(&lv.cert_s), &lv.name);
                images = images.iter().map(|x| x.project_to(&next)).collect();
                images.push(next.generator(next.depth - 1));
                cur = next;
            }
        }
        let images = images.iter().map(|x| x.project_to(&cur)).collect();
        (cur.clone(), TowerHom { source: self.clone(), target: cur, images })
    }

    /// One line per level, `name: poly = 0`.
    pub fn render(self: &Arc<Self>) -> Vec<String> {
        (1..=self.depth)
            .map(|k| {
                let sub = self.prefix(k);
                let lv = sub.level.as_ref().unwrap();
                format!("{}: {} = 0", lv.name, lv.min_poly.render(&lv.name))
            })
            .collect()
    }
}

/// Result of [`Tower::decompose_by_idempotent`].
#[derive(Clone, Debug)]
pub struct IdempotentSplit {
    pub unit_parts: Vec<Part>,
    pub zero_parts: Vec<Part>,
}

impl IdempotentSplit {
    pub fn parts(&self) -> impl Iterator<Item = &Part> {
        self.unit_parts.iter().chain(&self.zero_parts)
    }
}

fn project_poly(p: &TPoly, target: &Arc<Tower>) -> TPoly {
    p.map(target.clone(), |c| c.project_to(target))
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut levels = Vec::new();
        let mut t = Some(self);
        while let Some(cur) = t {
            if let Some(lv) = &cur.level {
                levels.push(format!("{}: {}", lv.name, lv.min_poly.render(&lv.name)));
            }
            t = cur.parent.as_deref();
        }
        levels.reverse();
        write!(f, "Tower[{}]", levels.join("; "))
    }
}

/// Element of a tower, reduced modulo every defining polynomial.
#[derive(Clone)]
pub struct AlgElem {
    owner: Arc<Tower>,
    data: Vec<Rational>,
}

impl AlgElem {
    pub fn owner(&self) -> &Arc<Tower> {
        &self.owner
    }

    /// Coordinates in the monomial basis, first generator fastest.
    pub fn coords(&self) -> &[Rational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        is_zero_slice(&self.data)
    }

    pub fn is_one(&self) -> bool {
        self.data[0].is_one() && is_zero_slice(&self.data[1..])
    }

    /// The rational value when the element lies in the base field.
    pub fn as_rational(&self) -> Option<&Rational> {
        is_zero_slice(&self.data[1..]).then(|| &self.data[0])
    }

    pub fn checked_add(&self, o: &AlgElem) -> Result<AlgElem> {
        self.same_owner(o)?;
        Ok(self.zip(o, |a, b| a + b))
    }

    pub fn checked_mul(&self, o: &AlgElem) -> Result<AlgElem> {
        self.same_owner(o)?;
        Ok(AlgElem { owner: self.owner.clone(), data: self.owner.mul_raw(&self.data, &o.data) })
    }

    fn same_owner(&self, o: &AlgElem) -> Result<()> {
        if Tower::same(&self.owner, &o.owner) {
            Ok(())
        } else {
            Err(Error::OwnerMismatch)
        }
    }

    fn zip(&self, o: &AlgElem, f: impl Fn(&Rational, &Rational) -> Rational) -> AlgElem {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect();
        AlgElem { owner: self.owner.clone(), data }
    }

    pub fn scale(&self, r: &Rational) -> AlgElem {
        AlgElem { owner: self.owner.clone(), data: self.data.iter().map(|x| x * r).collect() }
    }

    pub fn pow(&self, k: usize) -> AlgElem {
        let mut acc = self.owner.one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Image in `target`, which must refine (and may extend) the owner.
    pub fn project_to(&self, target: &Arc<Tower>) -> AlgElem {
        if Arc::ptr_eq(&self.owner, target) {
            return self.clone();
        }
        assert!(target.depth >= self.owner.depth, "projection to a shorter tower");
        let pre = target.prefix(self.owner.depth);
        let mut data = Tower::project_raw(&self.owner, &pre, &self.data);
        data.resize(target.dim, Rational::zero());
        AlgElem { owner: target.clone(), data }
    }

    /// Reads a representative from a refinement `self.owner` of `target`
    /// (same depth) as an element of `target`.
    pub fn lift_to(&self, target: &Arc<Tower>) -> AlgElem {
        assert_eq!(self.owner.depth, target.depth, "lift between towers of different depth");
        AlgElem { owner: target.clone(), data: Tower::lift_raw(&self.owner, target, &self.data) }
    }

    /// Exponent vectors with nonzero coefficients, in index order.
    pub fn terms(&self) -> Vec<(Vec<usize>, Rational)> {
        let degs = self.owner.degrees();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mut i, c)| {
                let mut e = Vec::with_capacity(degs.len());
                for d in &degs {
                    e.push(i % d);
                    i /= d;
                }
                (e, c.clone())
            })
            .collect()
    }

    /// Renders with the given generator names.
    pub fn render_with(&self, names: &[String]) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (e, c) in terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            let mono = mono.join("*");
            let neg = c.is_negative();
            let a = c.abs();
            let num = a.numer().to_string();
            let den = a.denom().to_string();
            let mut term = if mono.is_empty() {
                num
            } else if num == "1" {
                mono
            } else {
                format!("{num}*{mono}")
            };
            if den != "1" {
                term = format!("{term}/{den}");
            }
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

impl PartialEq for AlgElem {
    fn eq(&self, o: &AlgElem) -> bool {
        self.data == o.data && Tower::same(&self.owner, &o.owner)
    }
}

impl fmt::Debug for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(&self.owner.names()))
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(&self.owner.names()))
    }
}

impl std::ops::Add for &AlgElem {
    type Output = AlgElem;
    fn add(self, o: &AlgElem) -> AlgElem {
        self.checked_add(o).expect("tower mismatch")
    }
}

impl std::ops::Sub for &AlgElem {
    type Output = AlgElem;
    fn sub(self, o: &AlgElem) -> AlgElem {
        self.same_owner(o).expect("tower mismatch");
        self.zip(o, |a, b| a - b)
    }
}

impl std::ops::Mul for &AlgElem {
    type Output = AlgElem;
    fn mul(self, o: &AlgElem) -> AlgElem {
        self.checked_mul(o).expect("tower mismatch")
    }
}

impl std::ops::Neg for &AlgElem {
    type Output = AlgElem;
    fn neg(self) -> AlgElem {
        AlgElem { owner: self.owner.clone(), data: self.data.iter().map(|x| -x).collect() }
    }
}

impl Ring for Arc<Tower> {
    type Elem = AlgElem;

    fn zero(&self) -> AlgElem {
        Tower::zero(self)
    }
    fn one(&self) -> AlgElem {
        Tower::one(self)
    }
    fn from_rational(&self, r: &Rational) -> AlgElem {
        self.constant(r.clone())
    }
    fn add(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        a + b
    }
    fn sub(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        a - b
    }
    fn neg(&self, a: &AlgElem) -> AlgElem {
        -a
    }
    fn mul(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        a * b
    }
    fn is_zero(&self, a: &AlgElem) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &AlgElem) -> bool {
        a.is_one()
    }
    fn scale(&self, a: &AlgElem, r: &Rational) -> AlgElem {
        a.scale(r)
    }
    fn render(&self, a: &AlgElem) -> String {
        a.render_with(&self.names())
    }
}

impl SplittingRing for Arc<Tower> {
    fn invert_or_split(&self, x: &AlgElem) -> SplitOutcome<Option<AlgElem>> {
        Tower::invert_or_split(self, x)
    }
}

/// Algebra homomorphism given by the images of the source generators.
#[derive(Clone)]
pub struct TowerHom {
    pub source: Arc<Tower>,
    pub target: Arc<Tower>,
    pub images: Vec<AlgElem>,
}

impl fmt::Debug for TowerHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.source.names();
        let maps: Vec<String> = names.iter().zip(&self.images).map(|(n, x)| format!("{n} -> {x}")).collect();
        write!(f, "Hom[{}]", maps.join(", "))
    }
}

impl TowerHom {
    pub fn new(source: &Arc<Tower>, target: &Arc<Tower>, images: Vec<AlgElem>) -> Result<TowerHom> {
        if images.len() != source.depth || images.iter().any(|x| !Tower::same(&x.owner, target)) {
            return Err(Error::OwnerMismatch);
        }
        Ok(TowerHom { source: source.clone(), target: target.clone(), images })
    }

    pub fn identity(t: &Arc<Tower>) -> TowerHom {
        TowerHom { source: t.clone(), target: t.clone(), images: t.generators() }
    }

    /// Canonical map onto a refinement (generators to generators).
    pub fn projection(source: &Arc<Tower>, target: &Arc<Tower>) -> TowerHom {
        let images = (0..source.depth).map(|k| target.generator(k)).collect();
        TowerHom { source: source.clone(), target: target.clone(), images }
    }

    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        assert!(
            x.owner.depth <= self.source.depth && Tower::same(&self.source.prefix(x.owner.depth), &x.owner),
            "element does not belong to the source"
        );
        self.apply_raw(&x.owner, &x.data)
    }

    pub fn checked_apply(&self, x: &AlgElem) -> Result<AlgElem> {
        if !Tower::same(&self.source, &x.owner) {
            return Err(Error::OwnerMismatch);
        }
        Ok(self.apply_raw(&x.owner, &x.data))
    }

    fn apply_raw(&self, t: &Arc<Tower>, data: &[Rational]) -> AlgElem {
        let Some(par) = &t.parent else {
            return self.target.constant(data[0].clone());
        };
        if is_zero_slice(&data[par.dim..]) {
            return self.apply_raw(par, &data[..par.dim]);
        }
        let img = &self.images[t.depth - 1];
        let mut acc = self.target.zero();
        for c in data.chunks(par.dim).rev() {
            acc = &acc * img;
            if !is_zero_slice(c) {
                acc = &acc + &self.apply_raw(par, c);
            }
        }
        acc
    }

    /// Pushes a polynomial over a prefix of the source into the target.
    pub fn apply_poly(&self, p: &TPoly) -> TPoly {
        p.map(self.target.clone(), |c| self.apply(c))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &TowerHom) -> TowerHom {
        let images = self.images.iter().map(|x| other.apply(x)).collect();
        TowerHom { source: self.source.clone(), target: other.target.clone(), images }
    }

    /// Every defining polynomial maps to zero at the image of its generator.
    pub fn verify(&self) -> bool {
        (0..self.source.depth).all(|k| {
            let p = self.apply_poly(&self.source.min_poly(k));
            p.eval(&self.images[k]).is_zero()
        })
    }
}

impl PartialEq for TowerHom {
    fn eq(&self, o: &TowerHom) -> bool {
        self.images == o.images
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Adjoins a root of a rational polynomial (coefficients lowest first).
    fn adjoin(t: &Arc<Tower>, cs: &[Rational], name: &str) -> Arc<Tower> {
        let p = Poly::from_rationals(t.clone(), cs);
        t.adjoin_root(&p, name).unwrap().value().unwrap()
    }

    #[test]
    fn defining_relation_and_product() {
        let c3 = adjoin(&Tower::base(), &[q(-3, 1), q(0, 1), q(1, 1)], "c");
        let c = c3.generator(0);
        assert_eq!(&c * &c, c3.int(3));
        let b = adjoin(&Tower::base(), &[q(-13, 36), q(0, 1), q(1, 1)], "b");
        let g = b.generator(0);
        let x = &g + &b.constant(q(1, 6));
        let y = &g - &b.constant(q(1, 6));
        assert_eq!(&x * &y, b.constant(q(1, 3)));
    }

    #[test]
    fn inverse_in_field() {
        let t = adjoin(&Tower::base(), &[q(-3, 1), q(0, 1), q(1, 1)], "c");
        let c = t.generator(0);
        let inv = t.invert_or_split(&c).value().unwrap().unwrap();
        assert_eq!(inv, c.scale(&q(1, 3)));
        assert_eq!(t.invert_or_split(&t.int(2)).value().unwrap().unwrap(), t.constant(q(1, 2)));
    }

    #[test]
    fn split_of_reducible_level() {
        let t = adjoin(&Tower::base(), &[q(0, 1), q(-1, 1), q(1, 1)], "a");
        assert_eq!(t.dimension(), 2);
        let a = t.generator(0);
        let SplitOutcome::Split(parts) = t.invert_or_split(&a) else { panic!("expected split") };
        assert_eq!(parts.len(), 2);
        let vals: Vec<_> = parts.iter().map(|p| p.projection.apply(&a)).collect();
        assert!(vals[0].is_zero());
        assert!(vals[1].is_one());
        assert_eq!(parts[1].idempotent, a);
        assert!(parts.iter().all(|p| p.projection.verify()));
        assert_eq!(t.quasi_inverse(&a), a);
    }

    #[test]
    fn idempotent_decomposition() {
        let t = adjoin(&Tower::base(), &[q(0, 1), q(-1, 1), q(1, 1)], "a");
        let a = t.generator(0);
        let d = t.decompose_by_idempotent(&a).unwrap();
        assert_eq!(d.unit_parts.len(), 1);
        assert_eq!(d.zero_parts.len(), 1);
        assert!(d.unit_parts[0].projection.apply(&a).is_one());
        assert_eq!(t.decompose_by_idempotent(&t.one()).unwrap_err(), Error::TrivialIdempotent);
        assert_eq!(t.decompose_by_idempotent(&t.int(2)).unwrap_err(), Error::NotIdempotent);
    }

    #[test]
    fn hom_application() {
        let t = adjoin(&Tower::base(), &[q(0, 1), q(-1, 1), q(1, 1)], "a");
        let a = t.generator(0);
        let h = TowerHom::new(&t, &Tower::base(), vec![Tower::base().zero()]).unwrap();
        assert!(h.verify());
        let x = &a + &t.constant(q(1, 6));
        assert_eq!(h.apply(&x), Tower::base().constant(q(1, 6)));
        assert_eq!(TowerHom::identity(&t).apply(&x), x);
    }

    #[test]
    fn prune_removes_linear_levels() {
        let a = adjoin(&Tower::base(), &[q(0, 1), q(1, 1)], "a");
        let b = adjoin(&a, &[q(-13, 36), q(0, 1), q(1, 1)], "b");
        let (p, h) = b.prune();
        assert_eq!(p.depth(), 1);
        assert_eq!(p.render(), vec!["b: b^2 - 13/36 = 0".to_string()]);
        assert!(h.verify());
    }

    #[test]
    fn non_separable_rejected() {
        let p = Poly::from_rationals(Tower::base(), &[q(0, 1), q(0, 1), q(1, 1)]);
        assert!(matches!(Tower::base().adjoin_root(&p, "x"), Err(Error::NotSeparable(_))));
    }

    /// Levels given as root lists; a level with `shifted` set moves every
    /// root by the previous generator, a level with no roots is `z^2 - k`.
    fn build(levels: &[(Vec<i64>, bool, i64)]) -> Arc<Tower> {
        let mut t = Tower::base();
        for (k, (roots, shifted, radicand)) in levels.iter().enumerate() {
            let name = ["a", "b", "c"][k];
            let p = if roots.is_empty() {
                Poly::from_rationals(t.clone(), &[q(-radicand, 1), q(0, 1), q(1, 1)])
            } else {
                let shift = if *shifted && t.depth() > 0 { t.generator(t.depth() - 1) } else { t.zero() };
                roots.iter().fold(Poly::one(t.clone()), |acc, r| {
                    &acc * &Poly::linear(t.clone(), &(&shift + &t.int(*r)))
                })
            };
            t = t.adjoin_root(&p, name).unwrap().value().unwrap();
        }
        t
    }

    fn levels() -> impl Strategy<Value = Vec<(Vec<i64>, bool, i64)>> {
        let level = (
            prop::collection::btree_set(-3i64..4, 0..3).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
            any::<bool>(),
            prop::sample::select(vec![-1i64, 2, 3, 5]),
        );
        prop::collection::vec(level, 1..4)
    }

    fn element(t: &Arc<Tower>, coords: &[i64]) -> AlgElem {
        t.from_data((0..t.dimension()).map(|i| q(coords[i % coords.len()], 1)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn zero_tests_and_splits(
            spec in levels(),
            xs in prop::collection::vec(-2i64..3, 1..6),
            ys in prop::collection::vec(-2i64..3, 1..6),
            factor in 0usize..3,
        ) {
            let t = build(&spec);
            let mut x = element(&t, &xs);
            if t.depth() > 0 {
                x = &x * &(&t.generator(factor % t.depth()) - &t.int(xs[0]));
            }
            let y = element(&t, &ys);
            let b = t.quasi_inverse(&x);
            prop_assert_eq!(&(&x * &b) * &x, x.clone());
            prop_assert_eq!(&(&b * &x) * &b, b.clone());
            match t.invert_or_split(&x) {
                SplitOutcome::Value(None) => prop_assert!(x.is_zero()),
                SplitOutcome::Value(Some(inv)) => {
                    prop_assert!(!x.is_zero());
                    prop_assert!((&x * &inv).is_one());
                }
                SplitOutcome::Split(parts) => {
                    prop_assert!(!x.is_zero());
                    let dims: usize = parts.iter().map(|p| p.tower.dimension()).sum();
                    prop_assert_eq!(dims, t.dimension());
                    for part in &parts {
                        let h = &part.projection;
                        prop_assert!(h.verify());
                        prop_assert_eq!(h.apply(&(&x + &y)), &h.apply(&x) + &h.apply(&y));
                        prop_assert_eq!(h.apply(&(&x * &y)), &h.apply(&x) * &h.apply(&y));
                        for k in 0..t.depth() {
                            let below = part.tower.prefix(k);
                            let original = project_poly(&t.min_poly(k), &below);
                            prop_assert!(original.rem(&part.tower.min_poly(k)).unwrap().is_zero());
                        }
                    }
                }
            }
            let (_, prune) = t.prune();
            prop_assert!(prune.verify());
            prop_assert_eq!(prune.apply(&(&x * &y)), &prune.apply(&x) * &prune.apply(&y));
        }
    }
}
