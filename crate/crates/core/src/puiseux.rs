//! Newton-Puiseux expansion over triangular separable algebras.
//!
//! Each step kills the subleading coefficient, finds the first Newton
//! polygon slope, adjoins a root of the separable associate of the initial
//! polynomial of the segment, and lifts the resulting coprime factorization
//! with Hensel's lemma. Zero tests may cut the current tower into pieces;
//! each piece is then carried on separately.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::hensel::hensel_lift;
use crate::scalars::Rational;
use crate::series::{first_unit_coefficient, Series, SeriesPoly};
use crate::tower::{AlgElem, SplitOutcome, TPoly, Tower};
use crate::upoly::{bezout_pair, root_multiplicity, separable_associate, Poly, SeparableAssociate};

/// Default bound on the order searched for a unit coefficient.
pub const DEFAULT_FUEL: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchMode {
    #[default]
    All,
    First,
}

/// Decisions taken along a branch, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Slope { factor: usize, m: usize, p: usize },
    Adjoin { name: String, degree: usize },
    Split { parts: usize, taken: usize },
    Factor { factor: usize, degrees: (usize, usize) },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Slope { factor, m, p } => write!(f, "factor {factor}: slope {p}/{m}"),
            TraceEvent::Adjoin { name, degree } => write!(f, "adjoin {name} of degree {degree}"),
            TraceEvent::Split { parts, taken } => write!(f, "split into {parts}, follow part {taken}"),
            TraceEvent::Factor { factor, degrees: (s, t) } => write!(f, "factor {factor} -> degrees {s} and {t}"),
        }
    }
}

/// Where a generator shows up in the expansions: it is the coefficient of
/// `X^exponent` in some root, minus `shift`.
#[derive(Clone, Debug)]
pub struct LevelOrigin {
    pub exponent: (usize, usize),
    /// Over the tower below the level.
    pub shift: AlgElem,
}

/// A root `η` of `F(T^m, Y)`; the factor is `Y - η`.
#[derive(Clone, Debug)]
pub struct PuiseuxFactor {
    pub eta: Series,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub tower: Arc<Tower>,
    pub ramification: usize,
    pub factors: Vec<PuiseuxFactor>,
    pub origins: Vec<LevelOrigin>,
    pub trace: Vec<TraceEvent>,
}

impl Branch {
    pub fn dimension(&self) -> usize {
        self.tower.dimension()
    }

    pub fn etas(&self) -> Vec<Series> {
        self.factors.iter().map(|f| f.eta.clone()).collect()
    }
}

/// `(F(Y + c), c)` with `c = -α_1/n`, so the result has no `Y^(n-1)` term.
pub fn tschirnhaus_shift(f: &SeriesPoly) -> (SeriesPoly, Series) {
    let n = f.degree();
    let a1 = f.alpha(1);
    if a1.is_known_zero() {
        return (f.clone(), Series::zero(f.owner()));
    }
    let c = a1.scale_rational(&Rational::new(-1, n as i64));
    (f.translate(&c), c)
}

/// First slope `(m, p)`, in lowest terms, of the Newton polygon of a monic
/// `F` with vanishing subleading coefficient.
pub fn newton_slope(f: &SeriesPoly, fuel: usize) -> Result<SplitOutcome<(usize, usize)>> {
    let n = f.degree();
    if n < 2 {
        return Err(Error::PreconditionViolation("degree below 2".into()));
    }
    let owner = f.owner();
    for i in 2..=n {
        match owner.invert_or_split(&f.alpha(i).coeff_at(0)) {
            SplitOutcome::Value(Some(_)) => return Ok(SplitOutcome::Value((1, 0))),
            SplitOutcome::Value(None) => {}
            SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
        }
    }
    let (mut bi, mut bj) = match first_unit_coefficient(f, fuel)? {
        SplitOutcome::Value(v) => v,
        SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
    };
    for i in 2..=n {
        let mut j = 0;
        // j/i < bj/bi
        while j * bi < bj * i {
            match owner.invert_or_split(&f.alpha(i).coeff_at(j)) {
                SplitOutcome::Value(Some(_)) => {
                    (bi, bj) = (i, j);
                    break;
                }
                SplitOutcome::Value(None) => j += 1,
                SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
            }
        }
    }
    let g = bi.gcd(&bj);
    Ok(SplitOutcome::Value((bi / g, bj / g)))
}

/// One leaf of an exploration: the tower it lives on and how it was reached.
#[derive(Clone, Debug)]
pub struct Leaf<T> {
    pub tower: Arc<Tower>,
    pub value: T,
    pub trace: Vec<TraceEvent>,
}

fn explore<T>(
    tower: &Arc<Tower>,
    mode: BranchMode,
    trace: Vec<TraceEvent>,
    f: &mut dyn FnMut(&Arc<Tower>) -> Result<SplitOutcome<T>>,
) -> Result<Vec<Leaf<T>>> {
    match f(tower)? {
        SplitOutcome::Value(value) => Ok(vec![Leaf { tower: tower.clone(), value, trace }]),
        SplitOutcome::Split(parts) => {
            let total = parts.len();
            let mut out = Vec::new();
            for (k, part) in parts.into_iter().enumerate() {
                let mut t = trace.clone();
                t.push(TraceEvent::Split { parts: total, taken: k });
                out.extend(explore(&part.tower, mode, t, f)?);
                if mode == BranchMode::First {
                    break;
                }
            }
            Ok(out)
        }
    }
}

fn project_poly(p: &TPoly, target: &Arc<Tower>) -> TPoly {
    p.map(target.clone(), |c| c.project_to(target))
}

struct Prepared {
    shift: Series,
    m: usize,
    p: usize,
    segment: SeriesPoly,
    initial: TPoly,
    sep: SeparableAssociate<Arc<Tower>>,
}

fn prepare(f: &SeriesPoly, fuel: usize) -> Result<SplitOutcome<Prepared>> {
    let (shifted, shift) = tschirnhaus_shift(f);
    let (m, p) = match newton_slope(&shifted, fuel)? {
        SplitOutcome::Value(v) => v,
        SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
    };
    let segment = shifted.segment_substitute(m, p)?;
    let initial = segment.x_coeff(0);
    let sep = match separable_associate(&initial)? {
        SplitOutcome::Value(v) => v,
        SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
    };
    Ok(SplitOutcome::Value(Prepared { shift, m, p, segment, initial, sep }))
}

/// A proper factorization `F(T^m, Y) = G·H` over `tower`, where `G(0,Y)`
/// is a power of `Y - T^p a` for the new generator `a`.
#[derive(Clone, Debug)]
pub struct SegmentStep {
    pub m: usize,
    pub p: usize,
    pub multiplicity: usize,
    pub g: SeriesPoly,
    pub h: SeriesPoly,
    /// Coefficient of the shift at `T^p` (after ramification), over the
    /// tower below the new generator.
    pub shift_at_p: AlgElem,
}

fn resume(s: &Arc<Tower>, pre: &Prepared, n: usize, shift_at_p: AlgElem) -> Result<SplitOutcome<SegmentStep>> {
    let a = s.generator(s.depth() - 1);
    let q = project_poly(&pre.initial, s);
    let (mult, l) = match root_multiplicity(&q, &a)? {
        SplitOutcome::Value(v) => v,
        SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
    };
    if mult == n {
        return Err(Error::InvariantViolation("initial polynomial is a pure power".into()));
    }
    let g0 = Poly::linear(s.clone(), &a).pow(mult);
    let (h_star, g_star) = match bezout_pair(&g0, &l)? {
        SplitOutcome::Value(v) => v,
        SplitOutcome::Split(parts) => return Ok(SplitOutcome::Split(parts)),
    };
    let v = pre.segment.project(s);
    let (g1, h1) = hensel_lift(&v, &g0, &l, &h_star, &g_star)?;
    let back = pre.shift.project(s).ramify(pre.m);
    let g = g1.unsegment_factor(pre.p).translate(&back.neg());
    let h = h1.unsegment_factor(pre.p).translate(&back.neg());
    Ok(SplitOutcome::Value(SegmentStep { m: pre.m, p: pre.p, multiplicity: mult, g, h, shift_at_p }))
}

/// Generator name for the level at `depth` (0-based).
pub fn level_name(depth: usize) -> String {
    if depth < 26 {
        ((b'a' + depth as u8) as char).to_string()
    } else {
        format!("z{depth}")
    }
}

/// All factorization steps of `F` (degree ≥ 2) over the pieces of its owner
/// tower, each on a tower extended by one generator.
pub fn segment_factor_step(f: &SeriesPoly, mode: BranchMode, fuel: usize) -> Result<Vec<Leaf<SegmentStep>>> {
    let n = f.degree();
    if n < 2 {
        return Err(Error::PreconditionViolation("degree below 2".into()));
    }
    let owner = f.owner().clone();
    let prepared = explore(&owner, mode, Vec::new(), &mut |r| prepare(&f.project(r), fuel))?;
    let mut out = Vec::new();
    for leaf in prepared {
        let pre = leaf.value;
        let r = &leaf.tower;
        let name = level_name(r.depth());
        let s = Tower::extend_certified(r, &pre.sep.h, &pre.sep.r, &pre.sep.s, &name)?;
        let mut trace = leaf.trace;
        trace.push(TraceEvent::Adjoin { name, degree: pre.sep.h.deg() });
        let shift_at_p = if pre.p % pre.m == 0 { pre.shift.coeff_at(pre.p / pre.m) } else { r.zero() };
        let steps = explore(&s, mode, trace, &mut |s2| {
            let projected = Prepared {
                shift: pre.shift.project(s2),
                m: pre.m,
                p: pre.p,
                segment: pre.segment.project(s2),
                initial: project_poly(&pre.initial, s2),
                sep: pre.sep.clone(),
            };
            resume(s2, &projected, n, shift_at_p.project_to(&s2.prefix(s2.depth() - 1)))
        })?;
        out.extend(steps);
        if mode == BranchMode::First && !out.is_empty() {
            break;
        }
    }
    Ok(out)
}

struct WorkItem {
    tower: Arc<Tower>,
    ramification: usize,
    factors: Vec<SeriesPoly>,
    origins: Vec<LevelOrigin>,
    trace: Vec<TraceEvent>,
}

/// Expands a monic polynomial, separable over `K((X))`, into linear
/// factors over one or more triangular separable algebras.
pub fn expand(f: &SeriesPoly, mode: BranchMode, fuel: usize) -> Result<Vec<Branch>> {
    if f.degree() == 0 {
        return Err(Error::Constant);
    }
    let mut out = Vec::new();
    let mut stack = vec![WorkItem {
        tower: f.owner().clone(),
        ramification: 1,
        factors: vec![f.clone()],
        origins: Vec::new(),
        trace: Vec::new(),
    }];
    while let Some(item) = stack.pop() {
        let Some(idx) = item.factors.iter().position(|g| g.degree() > 1) else {
            out.push(finish(item));
            continue;
        };
        let leaves = segment_factor_step(&item.factors[idx], mode, fuel)?;
        let mut children = Vec::new();
        for leaf in leaves {
            let s = &leaf.tower;
            let step = leaf.value;
            let mut factors = Vec::with_capacity(item.factors.len() + 1);
            for (j, g) in item.factors.iter().enumerate() {
                if j == idx {
                    factors.push(step.g.clone());
                    factors.push(step.h.clone());
                } else {
                    factors.push(g.substitute_ramify(step.m).project(s));
                }
            }
            let den = step.m * item.ramification;
            let g = step.p.gcd(&den);
            let mut origins = item.origins.clone();
            origins.push(LevelOrigin { exponent: (step.p / g, den / g), shift: step.shift_at_p });
            let mut trace = item.trace.clone();
            trace.push(TraceEvent::Slope { factor: idx, m: step.m, p: step.p });
            trace.extend(leaf.trace);
            trace.push(TraceEvent::Factor { factor: idx, degrees: (step.g.degree(), step.h.degree()) });
            children.push(WorkItem {
                tower: s.clone(),
                ramification: den,
                factors,
                origins,
                trace,
            });
        }
        stack.extend(children.into_iter().rev());
    }
    Ok(out)
}

fn finish(item: WorkItem) -> Branch {
    let tower = item.tower;
    let factors = item.factors.iter().map(|g| PuiseuxFactor { eta: g.alpha(1).neg() }).collect();
    let origins = item
        .origins
        .into_iter()
        .enumerate()
        .map(|(l, o)| LevelOrigin { exponent: o.exponent, shift: o.shift.project_to(&tower.prefix(l)) })
        .collect();
    Branch { tower, ramification: item.ramification, factors, origins, trace: item.trace }
}

fn trunc_mul(a: &[AlgElem], b: &[AlgElem], zero: &AlgElem) -> Vec<AlgElem> {
    let n = a.len();
    let mut out = vec![zero.clone(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..n - i].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Coefficient rows of `F(T^m, Y)` over `tower`, truncated at `T^order`.
fn target_rows(f: &SeriesPoly, m: usize, tower: &Arc<Tower>, order: usize) -> Vec<Vec<AlgElem>> {
    f.substitute_ramify(m).project(tower).truncated_rows(order)
}

/// `∏ (Y - η_i) ≡ F(T^m, Y) mod T^order`, exactly.
pub fn verify_product(f: &SeriesPoly, b: &Branch, order: usize) -> bool {
    verify_etas(f, &b.tower, b.ramification, &b.etas(), order)
}

/// Same check for an explicit list of roots.
pub fn verify_etas(f: &SeriesPoly, tower: &Arc<Tower>, m: usize, etas: &[Series], order: usize) -> bool {
    if order == 0 {
        return true;
    }
    if etas.len() != f.degree() {
        return false;
    }
    let zero = tower.zero();
    // prod[i] is the coefficient of Y^(k-i) after k factors
    let mut prod: Vec<Vec<AlgElem>> = vec![{
        let mut one = vec![zero.clone(); order];
        one[0] = tower.one();
        one
    }];
    for eta in etas {
        let e: Vec<AlgElem> = eta.truncated(order).iter().map(|c| c.project_to(tower)).collect();
        let mut next = prod.clone();
        next.push(vec![zero.clone(); order]);
        for (i, c) in prod.iter().enumerate() {
            let t = trunc_mul(c, &e, &zero);
            for (x, y) in next[i + 1].iter_mut().zip(t) {
                *x = &*x - &y;
            }
        }
        prod = next;
    }
    prod == target_rows(f, m, tower, order)
}

/// `F(T^m, η) ≡ 0 mod T^order`.
pub fn check_root(f: &SeriesPoly, tower: &Arc<Tower>, m: usize, eta: &Series, order: usize) -> bool {
    if order == 0 {
        return true;
    }
    let zero = tower.zero();
    let e: Vec<AlgElem> = eta.truncated(order).iter().map(|c| c.project_to(tower)).collect();
    let rows = target_rows(f, m, tower, order);
    let mut acc = rows[0].clone();
    for row in &rows[1..] {
        acc = trunc_mul(&acc, &e, &zero);
        for (x, y) in acc.iter_mut().zip(row) {
            *x = &*x + y;
        }
    }
    acc.iter().all(AlgElem::is_zero)
}
