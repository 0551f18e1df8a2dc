//! Comparing the algebras produced by the expansion: when one algebra
//! splits another, the homomorphisms this induces, and the decomposition of
//! two mutually splitting algebras into powers of a common one.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::puiseux::{Branch, LevelOrigin};
use crate::scalars::Rational;
use crate::series::Series;
use crate::tower::{AlgElem, IdempotentSplit, Part, SplitOutcome, TPoly, Tower, TowerHom};
use crate::upoly::Poly;

/// A tower together with the expansions computed over it, which supply
/// candidate roots when testing whether it splits another tower.
#[derive(Clone, Debug)]
pub struct ExpansionAlgebra {
    pub tower: Arc<Tower>,
    pub ramification: usize,
    pub etas: Vec<Series>,
    pub origins: Vec<LevelOrigin>,
}

impl ExpansionAlgebra {
    /// A tower with no expansion data.
    pub fn bare(tower: &Arc<Tower>) -> ExpansionAlgebra {
        ExpansionAlgebra { tower: tower.clone(), ramification: 1, etas: Vec::new(), origins: Vec::new() }
    }

    pub fn from_branch(b: &Branch) -> ExpansionAlgebra {
        ExpansionAlgebra {
            tower: b.tower.clone(),
            ramification: b.ramification,
            etas: b.etas(),
            origins: b.origins.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.tower.dimension()
    }

    /// The same data over a refinement of the tower.
    pub fn project(&self, target: &Arc<Tower>) -> ExpansionAlgebra {
        ExpansionAlgebra {
            tower: target.clone(),
            ramification: self.ramification,
            etas: self.etas.iter().map(|e| e.project(target)).collect(),
            origins: self
                .origins
                .iter()
                .enumerate()
                .map(|(l, o)| LevelOrigin { exponent: o.exponent, shift: o.shift.project_to(&target.prefix(l)) })
                .collect(),
        }
    }

    /// Coefficient of `X^(num/den)` in every expansion.
    fn coefficients_at(&self, (num, den): (usize, usize)) -> Vec<AlgElem> {
        let m = self.ramification;
        self.etas
            .iter()
            .map(|e| if (num * m).is_multiple_of(den) { e.coeff_at(num * m / den) } else { self.tower.zero() })
            .collect()
    }
}

/// One chosen root at some level, with the roots of the next level below it.
#[derive(Clone, Debug)]
pub struct WitnessNode {
    pub root: AlgElem,
    pub children: Vec<WitnessNode>,
}

/// A family of roots showing that `target` splits `source`.
#[derive(Clone, Debug)]
pub struct SplitWitness {
    pub source: Arc<Tower>,
    pub target: Arc<Tower>,
    pub roots: Vec<WitnessNode>,
}

impl SplitWitness {
    /// Rechecks every linear factorization by multiplication.
    pub fn verify(&self) -> bool {
        fn walk(w: &SplitWitness, nodes: &[WitnessNode], images: &mut Vec<AlgElem>) -> bool {
            let level = images.len();
            if level == w.source.depth() {
                return nodes.is_empty();
            }
            let hom = TowerHom::new(&w.source.prefix(level), &w.target, images.clone()).unwrap();
            let p = hom.apply_poly(&w.source.min_poly(level));
            let roots: Vec<AlgElem> = nodes.iter().map(|n| n.root.clone()).collect();
            if product_of_linears(&w.target, &roots) != p {
                return false;
            }
            nodes.iter().all(|n| {
                images.push(n.root.clone());
                let ok = walk(w, &n.children, images);
                images.pop();
                ok
            })
        }
        walk(self, &self.roots, &mut Vec::new())
    }
}

fn product_of_linears(t: &Arc<Tower>, roots: &[AlgElem]) -> TPoly {
    roots.iter().fold(Poly::one(t.clone()), |acc, r| &acc * &Poly::linear(t.clone(), r))
}

fn project_poly(p: &TPoly, target: &Arc<Tower>) -> TPoly {
    p.map(target.clone(), |c| c.project_to(target))
}

/// Sum of `e_j · x_j` over the parts of a split, read back in the source.
fn reassemble(source: &Arc<Tower>, parts: &[Part], values: &[AlgElem]) -> AlgElem {
    parts
        .iter()
        .zip(values)
        .fold(source.zero(), |acc, (part, x)| &acc + &(&part.idempotent * &x.lift_to(source)))
}

/// Linear factorization of a monic separable `p` over `t`, trying the
/// candidates in order. Zero divisors split `t` internally; the roots found
/// on each piece are glued back with the idempotents.
fn linear_roots(t: &Arc<Tower>, p: &TPoly, cands: &[AlgElem]) -> Option<Vec<AlgElem>> {
    let mut roots = Vec::new();
    let mut cur = p.clone();
    let mut idx = 0;
    while cur.deg() > 0 {
        if cur.deg() == 1 {
            roots.push(-&cur.coeff(0));
            break;
        }
        let c = cands.get(idx)?;
        match t.invert_or_split(&cur.eval(c)) {
            SplitOutcome::Value(None) => {
                cur = cur.exact_div(&Poly::linear(t.clone(), c)).ok()?;
                roots.push(c.clone());
                idx = 0;
            }
            SplitOutcome::Value(Some(_)) => idx += 1,
            SplitOutcome::Split(parts) => {
                let mut per_part = Vec::with_capacity(parts.len());
                for part in &parts {
                    let pc: Vec<AlgElem> = cands.iter().map(|x| x.project_to(&part.tower)).collect();
                    per_part.push(linear_roots(&part.tower, &project_poly(&cur, &part.tower), &pc)?);
                }
                for i in 0..cur.deg() {
                    let vals: Vec<AlgElem> = per_part.iter().map(|rs| rs[i].clone()).collect();
                    roots.push(reassemble(t, &parts, &vals));
                }
                break;
            }
        }
    }
    Some(roots)
}

fn candidates(a: &ExpansionAlgebra, r: &ExpansionAlgebra, level: usize, hom: &TowerHom) -> Vec<AlgElem> {
    let t = &a.tower;
    let mut out = vec![t.zero(), t.one(), -&t.one()];
    if let Some(o) = r.origins.get(level) {
        let shift = hom.apply(&o.shift);
        for c in a.coefficients_at(o.exponent) {
            out.push(&c - &shift);
        }
    }
    for g in t.generators() {
        out.push(-&g);
        out.push(g);
    }
    out
}

fn build_level(a: &ExpansionAlgebra, r: &ExpansionAlgebra, images: &mut Vec<AlgElem>) -> Option<Vec<WitnessNode>> {
    let level = images.len();
    if level == r.tower.depth() {
        return Some(Vec::new());
    }
    let hom = TowerHom::new(&r.tower.prefix(level), &a.tower, images.clone()).ok()?;
    let p = hom.apply_poly(&r.tower.min_poly(level));
    let roots = linear_roots(&a.tower, &p, &candidates(a, r, level, &hom))?;
    let mut nodes = Vec::with_capacity(roots.len());
    for root in roots {
        images.push(root.clone());
        let children = build_level(a, r, images);
        images.pop();
        nodes.push(WitnessNode { root, children: children? });
    }
    Some(nodes)
}

/// Witness that `a` splits `r`, with candidate roots read off the
/// expansions of both algebras.
pub fn splits_check_expansions(a: &ExpansionAlgebra, r: &ExpansionAlgebra) -> Option<SplitWitness> {
    let roots = build_level(a, r, &mut Vec::new())?;
    let w = SplitWitness { source: r.tower.clone(), target: a.tower.clone(), roots };
    w.verify().then_some(w)
}

/// Witness that `a` splits `r`, trying only `0`, `±1` and `±` generators
/// (besides the root forced by a linear remainder).
pub fn splits_check(a: &Arc<Tower>, r: &Arc<Tower>) -> Option<SplitWitness> {
    splits_check_expansions(&ExpansionAlgebra::bare(a), &ExpansionAlgebra::bare(r))
}

/// One homomorphism per path of the witness tree.
pub fn enumerate_homs(w: &SplitWitness) -> Vec<TowerHom> {
    fn walk(w: &SplitWitness, nodes: &[WitnessNode], images: &mut Vec<AlgElem>, out: &mut Vec<TowerHom>) {
        if images.len() == w.source.depth() {
            out.push(TowerHom::new(&w.source, &w.target, images.clone()).unwrap());
            return;
        }
        for n in nodes {
            images.push(n.root.clone());
            walk(w, &n.children, images, out);
            images.pop();
        }
    }
    let mut out = Vec::new();
    walk(w, &w.roots, &mut Vec::new(), &mut out);
    out
}

/// Whether every piece of a decomposition splits `r`; the product then
/// splits `r` as well.
pub fn parts_split(parts: &[ExpansionAlgebra], r: &ExpansionAlgebra) -> bool {
    parts.iter().all(|p| splits_check_expansions(p, r).is_some())
}

/// Exact linear algebra over the rationals on dense row-major matrices.
mod linalg {
    use crate::scalars::Rational;

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            let inv = m[r][c].inv().unwrap();
            for x in m[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    let (top, rest) = if i < r { let (a, b) = m.split_at_mut(r); (&mut a[i], &b[0]) } else { let (a, b) = m.split_at_mut(i); (&mut b[0], &a[r]) };
                    for (x, y) in top.iter_mut().zip(rest.iter()) {
                        if !y.is_zero() {
                            *x -= &(&f * y);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        pivots
    }

    /// A nonzero vector `k` with `m·k = 0`, if the columns are dependent.
    pub fn kernel_vector(m: &[Vec<Rational>]) -> Option<Vec<Rational>> {
        let cols = m.first().map_or(0, Vec::len);
        let mut a = m.to_vec();
        let pivots = rref(&mut a);
        let free = (0..cols).find(|c| !pivots.contains(c))?;
        let mut k = vec![Rational::zero(); cols];
        k[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            k[pc] = -&a[row][free];
        }
        Some(k)
    }

    /// Solutions of `m·x = b` for each right-hand side, when `m` is invertible.
    pub fn solve_many(m: &[Vec<Rational>], rhs: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
        let n = m.len();
        let mut a: Vec<Vec<Rational>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend(rhs.iter().map(|b| b[i].clone()));
                r
            })
            .collect();
        let pivots = rref(&mut a);
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        Some((0..rhs.len()).map(|j| (0..n).map(|i| a[i][n + j].clone()).collect()).collect())
    }
}

/// Matrix whose column `i` holds the coordinates of the image of the
/// `i`-th monomial of the basis.
fn basis_image_matrix(pi: &TowerHom) -> Vec<Vec<Rational>> {
    let t = &pi.source;
    let dim = t.dimension();
    let degs = t.degrees();
    let powers: Vec<Vec<AlgElem>> = pi
        .images
        .iter()
        .zip(&degs)
        .map(|(g, &d)| {
            let mut v = vec![pi.target.one()];
            for e in 1..d {
                v.push(&v[e - 1] * g);
            }
            v
        })
        .collect();
    let mut cols = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut rest = i;
        let mut img = pi.target.one();
        for (k, d) in degs.iter().enumerate() {
            let e = rest % d;
            rest /= d;
            if e > 0 {
                img = &img * &powers[k][e];
            }
        }
        cols.push(img.coords().to_vec());
    }
    let rows = pi.target.dimension();
    (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

#[derive(Clone, Debug)]
pub enum EndoOutcome {
    /// The endomorphism is bijective; `inverse` undoes it.
    Automorphism { inverse: TowerHom },
    /// A nonzero element of the kernel, the idempotent it generates, and the
    /// resulting decomposition.
    Decomposition { kernel_element: AlgElem, idempotent: AlgElem, split: IdempotentSplit },
}

/// Either inverts an endomorphism or decomposes its source along its kernel.
pub fn endo_decompose(a: &Arc<Tower>, pi: &TowerHom) -> Result<EndoOutcome> {
    if !Tower::same(&pi.source, a) || !Tower::same(&pi.target, a) || !pi.verify() {
        return Err(Error::NotEndomorphism);
    }
    let m = basis_image_matrix(pi);
    if let Some(k) = linalg::kernel_vector(&m) {
        let x = a.from_data(k);
        let e = &x * &a.quasi_inverse(&x);
        let split = a.decompose_by_idempotent(&e)?;
        return Ok(EndoOutcome::Decomposition { kernel_element: x, idempotent: e, split });
    }
    let rhs: Vec<Vec<Rational>> = a.generators().iter().map(|g| g.coords().to_vec()).collect();
    let sol = linalg::solve_many(&m, &rhs).ok_or_else(|| Error::InvariantViolation("full rank but singular".into()))?;
    let images = sol.into_iter().map(|v| a.from_data(v)).collect();
    Ok(EndoOutcome::Automorphism { inverse: TowerHom::new(a, a, images)? })
}

/// Mutually inverse homomorphisms.
#[derive(Clone, Debug)]
pub struct Isomorphism {
    pub forward: TowerHom,
    pub backward: TowerHom,
}

impl Isomorphism {
    pub fn verify(&self) -> bool {
        let there = self.forward.then(&self.backward);
        let back = self.backward.then(&self.forward);
        self.forward.verify()
            && self.backward.verify()
            && there == TowerHom::identity(&self.forward.source)
            && back == TowerHom::identity(&self.forward.target)
    }
}

enum Comparison {
    Isomorphic(Isomorphism),
    SplitLeft(Vec<ExpansionAlgebra>),
    SplitRight(Vec<ExpansionAlgebra>),
}

fn first_hom(from: &ExpansionAlgebra, to: &ExpansionAlgebra) -> Result<TowerHom> {
    let w = splits_check_expansions(to, from).ok_or(Error::DoNotSplitEachOther)?;
    enumerate_homs(&w).into_iter().next().ok_or(Error::DoNotSplitEachOther)
}

fn pieces(x: &ExpansionAlgebra, split: &IdempotentSplit) -> Vec<ExpansionAlgebra> {
    split.parts().map(|p| x.project(&p.tower)).collect()
}

fn compare(x: &ExpansionAlgebra, y: &ExpansionAlgebra) -> Result<Comparison> {
    let phi = first_hom(x, y)?;
    let theta = first_hom(y, x)?;
    let inverse = match endo_decompose(&x.tower, &phi.then(&theta))? {
        EndoOutcome::Decomposition { split, .. } => return Ok(Comparison::SplitLeft(pieces(x, &split))),
        EndoOutcome::Automorphism { inverse } => inverse,
    };
    if let EndoOutcome::Decomposition { split, .. } = endo_decompose(&y.tower, &theta.then(&phi))? {
        return Ok(Comparison::SplitRight(pieces(y, &split)));
    }
    let iso = Isomorphism { backward: theta.then(&inverse), forward: phi };
    if !iso.verify() {
        return Err(Error::InvariantViolation("composed maps are not inverse".into()));
    }
    Ok(Comparison::Isomorphic(iso))
}

/// Piece to follow towards an algebra of dimension `target`: the smallest
/// piece at least that large, else the largest.
fn pick(parts: Vec<ExpansionAlgebra>, target: usize) -> ExpansionAlgebra {
    let mut parts = parts;
    parts.sort_by_key(|p| p.dimension());
    match parts.iter().position(|p| p.dimension() >= target) {
        Some(i) => parts.swap_remove(i),
        None => parts.pop().expect("a split has parts"),
    }
}

/// `A ≅ R^n` and `B ≅ R^m`, with an isomorphism from each piece to `R`.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub common: ExpansionAlgebra,
    pub n: usize,
    pub m: usize,
    pub a_pieces: Vec<Isomorphism>,
    pub b_pieces: Vec<Isomorphism>,
}

enum Count {
    Done(Vec<Isomorphism>),
    Refine(ExpansionAlgebra),
}

fn count_copies(x: &ExpansionAlgebra, r: &ExpansionAlgebra) -> Result<Count> {
    let mut stack = vec![x.clone()];
    let mut isos = Vec::new();
    while let Some(p) = stack.pop() {
        match compare(&p, r)? {
            Comparison::Isomorphic(iso) => isos.push(iso),
            Comparison::SplitLeft(parts) => stack.extend(parts.into_iter().rev()),
            Comparison::SplitRight(parts) => return Ok(Count::Refine(pick(parts, 0))),
        }
    }
    Ok(Count::Done(isos))
}

/// Common algebra `R` of two mutually splitting algebras, with `A ≅ R^n`
/// and `B ≅ R^m`.
pub fn normalize_pair(a: &ExpansionAlgebra, b: &ExpansionAlgebra) -> Result<Normalization> {
    let (mut x, mut y) = (a.clone(), b.clone());
    let mut r = loop {
        match compare(&x, &y)? {
            Comparison::Isomorphic(_) => break y,
            Comparison::SplitLeft(parts) => x = pick(parts, y.dimension()),
            Comparison::SplitRight(parts) => y = pick(parts, x.dimension()),
        }
    };
    loop {
        let a_pieces = match count_copies(a, &r)? {
            Count::Done(v) => v,
            Count::Refine(smaller) => {
                r = smaller;
                continue;
            }
        };
        let b_pieces = match count_copies(b, &r)? {
            Count::Done(v) => v,
            Count::Refine(smaller) => {
                r = smaller;
                continue;
            }
        };
        let (n, m) = (a_pieces.len(), b_pieces.len());
        if n * r.dimension() != a.dimension() || m * r.dimension() != b.dimension() {
            return Err(Error::InvariantViolation("dimensions do not add up".into()));
        }
        return Ok(Normalization { common: r, n, m, a_pieces, b_pieces });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upoly::Poly;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ext(parent: &Arc<Tower>, cs: &[Rational], name: &str) -> Arc<Tower> {
        let p = Poly::new(parent.clone(), cs.iter().map(|c| parent.constant(c.clone())).collect());
        parent.adjoin_root(&p, name).unwrap().value().unwrap()
    }

    #[test]
    fn trivial_and_quadratic_witnesses() {
        let base = Tower::base();
        let w = splits_check(&base, &base).unwrap();
        assert_eq!(enumerate_homs(&w).len(), 1);
        let c = ext(&base, &[q(-3, 1), q(0, 1), q(1, 1)], "c");
        let w = splits_check(&c, &c).unwrap();
        let homs = enumerate_homs(&w);
        assert_eq!(homs.len(), 2);
        let g = c.generator(0);
        let images: Vec<AlgElem> = homs.iter().map(|h| h.images[0].clone()).collect();
        assert!(images.contains(&g) && images.contains(&-&g));
        assert!(homs.iter().all(TowerHom::verify));
        assert!(splits_check(&base, &c).is_none());
    }

    #[test]
    fn endomorphisms() {
        let base = Tower::base();
        let c = ext(&base, &[q(-3, 1), q(0, 1), q(1, 1)], "c");
        assert!(matches!(endo_decompose(&c, &TowerHom::identity(&c)).unwrap(), EndoOutcome::Automorphism { .. }));
        let flip = TowerHom::new(&c, &c, vec![-&c.generator(0)]).unwrap();
        match endo_decompose(&c, &flip).unwrap() {
            EndoOutcome::Automorphism { inverse } => assert_eq!(inverse, flip),
            _ => panic!("expected an automorphism"),
        }
        let bad = TowerHom::new(&c, &c, vec![c.one()]).unwrap();
        assert_eq!(endo_decompose(&c, &bad).unwrap_err(), Error::NotEndomorphism);
        // a -> 0 on Q[a]/(a^2 - a) kills a
        let e = ext(&base, &[q(0, 1), q(-1, 1), q(1, 1)], "a");
        let collapse = TowerHom::new(&e, &e, vec![e.zero()]).unwrap();
        match endo_decompose(&e, &collapse).unwrap() {
            EndoOutcome::Decomposition { split, .. } => assert_eq!(split.parts().count(), 2),
            _ => panic!("expected a decomposition"),
        }
    }

    #[test]
    fn product_of_two_copies() {
        let base = Tower::base();
        let e = ext(&base, &[q(0, 1), q(-1, 1), q(1, 1)], "a");
        let nf = normalize_pair(&ExpansionAlgebra::bare(&e), &ExpansionAlgebra::bare(&base)).unwrap();
        assert_eq!((nf.common.dimension(), nf.n, nf.m), (1, 2, 1));
        let nf = normalize_pair(&ExpansionAlgebra::bare(&base), &ExpansionAlgebra::bare(&base)).unwrap();
        assert_eq!((nf.n, nf.m), (1, 1));
        let c = ext(&base, &[q(-3, 1), q(0, 1), q(1, 1)], "c");
        assert_eq!(
            normalize_pair(&ExpansionAlgebra::bare(&c), &ExpansionAlgebra::bare(&base)).unwrap_err(),
            Error::DoNotSplitEachOther
        );
    }
}
