//! Linear Hensel lifting of a coprime factorization `F(0,Y) = G0·H0`.

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::series::{Series, SeriesPoly};
use crate::tower::{TPoly, Tower};
use crate::upoly::Poly;

/// Shared lifting state; `gs[q]` and `hs[q]` are the `X^q` coefficients.
pub struct HenselState {
    f: SeriesPoly,
    g0: TPoly,
    h0: TPoly,
    h_star: TPoly,
    g_star: TPoly,
    gs: Vec<TPoly>,
    hs: Vec<TPoly>,
}

impl HenselState {
    pub fn new(f: &SeriesPoly, g0: &TPoly, h0: &TPoly, h_star: &TPoly, g_star: &TPoly) -> Result<HenselState> {
        let owner = f.owner();
        for p in [g0, h0, h_star, g_star] {
            if !Tower::same(p.ring(), owner) {
                return Err(Error::OwnerMismatch);
            }
        }
        if !g0.is_monic() || !h0.is_monic() {
            return Err(Error::NotMonic);
        }
        if g0 * h0 != f.x_coeff(0) {
            return Err(Error::PreconditionViolation("F(0,Y) is not G0·H0".into()));
        }
        let one = Poly::one(owner.clone());
        if &(g0 * h_star) + &(h0 * g_star) != one {
            return Err(Error::PreconditionViolation("Bézout identity fails".into()));
        }
        Ok(HenselState {
            f: f.clone(),
            g0: g0.clone(),
            h0: h0.clone(),
            h_star: h_star.clone(),
            g_star: g_star.clone(),
            gs: vec![g0.clone()],
            hs: vec![h0.clone()],
        })
    }

    /// Computes coefficients through `X^q`.
    pub fn ensure(&mut self, q: usize) -> Result<()> {
        while self.gs.len() <= q {
            let k = self.gs.len();
            let mut u = self.f.x_coeff(k);
            for i in 1..k {
                if !self.gs[i].is_zero() && !self.hs[k - i].is_zero() {
                    u = &u - &(&self.gs[i] * &self.hs[k - i]);
                }
            }
            let (e, h) = (&u * &self.h_star).divmod(&self.h0)?;
            let g = &(&e * &self.g0) + &(&self.g_star * &u);
            self.gs.push(g);
            self.hs.push(h);
        }
        Ok(())
    }

    pub fn g_coeff(&mut self, q: usize) -> Result<TPoly> {
        self.ensure(q)?;
        Ok(self.gs[q].clone())
    }

    pub fn h_coeff(&mut self, q: usize) -> Result<TPoly> {
        self.ensure(q)?;
        Ok(self.hs[q].clone())
    }
}

fn factor_stream(owner: &Arc<Tower>, state: &Arc<Mutex<HenselState>>, degree: usize, first: bool) -> SeriesPoly {
    let tail = (1..=degree)
        .map(|i| {
            let st = state.clone();
            Series::from_fn(owner, 0, None, move |q, _| {
                let mut s = st.lock().unwrap();
                let p = if first { s.g_coeff(q) } else { s.h_coeff(q) };
                p.expect("divisor is monic").coeff(degree - i)
            })
        })
        .collect();
    SeriesPoly::monic(owner, tail)
}

/// Lazily lifted `(G, H)` with `F = G·H`, `G(0,Y) = G0`, `H(0,Y) = H0`.
pub fn hensel_lift(
    f: &SeriesPoly,
    g0: &TPoly,
    h0: &TPoly,
    h_star: &TPoly,
    g_star: &TPoly,
) -> Result<(SeriesPoly, SeriesPoly)> {
    let state = Arc::new(Mutex::new(HenselState::new(f, g0, h0, h_star, g_star)?));
    let owner = f.owner();
    let g = factor_stream(owner, &state, g0.deg(), true);
    let h = factor_stream(owner, &state, h0.deg(), false);
    Ok((g, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rational;
    use crate::upoly::bezout_pair;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn tp(t: &Arc<Tower>, cs: &[Rational]) -> TPoly {
        Poly::new(t.clone(), cs.iter().map(|c| t.constant(c.clone())).collect())
    }

    fn rats(s: &Series, n: usize) -> Vec<Rational> {
        s.truncated(n).iter().map(|c| c.as_rational().unwrap().clone()).collect()
    }

    #[test]
    fn square_root_of_one_plus_x() {
        let base = Tower::base();
        let f = SeriesPoly::from_rational_rows(&[vec![], vec![q(-1, 1), q(-1, 1)]]);
        let g0 = tp(&base, &[q(-1, 1), q(1, 1)]);
        let h0 = tp(&base, &[q(1, 1), q(1, 1)]);
        let (g, h) = hensel_lift(&f, &g0, &h0, &tp(&base, &[q(-1, 2)]), &tp(&base, &[q(1, 2)])).unwrap();
        assert_eq!(rats(g.alpha(1), 3), vec![q(-1, 1), q(-1, 2), q(1, 8)]);
        assert_eq!(rats(h.alpha(1), 3), vec![q(1, 1), q(1, 2), q(-1, 8)]);
    }

    #[test]
    fn constant_input_lifts_trivially() {
        let base = Tower::base();
        let f = SeriesPoly::from_rational_rows(&[vec![], vec![q(-1, 1)]]);
        let g0 = tp(&base, &[q(-1, 1), q(1, 1)]);
        let h0 = tp(&base, &[q(1, 1), q(1, 1)]);
        let (g, _) = hensel_lift(&f, &g0, &h0, &tp(&base, &[q(-1, 2)]), &tp(&base, &[q(1, 2)])).unwrap();
        assert_eq!(rats(g.alpha(1), 4), vec![q(-1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn rejects_bad_seed() {
        let base = Tower::base();
        let f = SeriesPoly::from_rational_rows(&[vec![], vec![q(-1, 1)]]);
        let g0 = tp(&base, &[q(-1, 1), q(1, 1)]);
        let h0 = tp(&base, &[q(1, 1), q(1, 1)]);
        let one = tp(&base, &[q(1, 1)]);
        assert!(matches!(hensel_lift(&f, &g0, &h0, &one, &one), Err(Error::PreconditionViolation(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn product_identity(
            ga in prop::collection::vec(-4i64..5, 1..3),
            ha in prop::collection::vec(-4i64..5, 1..3),
            pert in prop::collection::vec(prop::collection::vec(-3i64..4, 0..4), 4),
        ) {
            let base = Tower::base();
            let mut gc: Vec<Rational> = ga.iter().map(|&c| q(c, 1)).collect();
            gc.push(q(1, 1));
            let mut hc: Vec<Rational> = ha.iter().map(|&c| q(c, 1)).collect();
            hc.push(q(1, 1));
            let g0 = tp(&base, &gc);
            let h0 = tp(&base, &hc);
            let Some((hs, gs)) = bezout_pair(&g0, &h0).ok().and_then(|o| o.value()) else {
                return Ok(());
            };
            let f0 = &g0 * &h0;
            let n = f0.deg();
            let rows: Vec<Vec<Rational>> = (1..=n)
                .map(|i| {
                    let mut row = vec![f0.coeff(n - i).as_rational().unwrap().clone()];
                    row.extend(pert.get(i - 1).into_iter().flatten().map(|&c| q(c, 1)));
                    row
                })
                .collect();
            let f = SeriesPoly::from_rational_rows(&rows);
            let (g, h) = hensel_lift(&f, &g0, &h0, &hs, &gs).unwrap();
            let prod = g.product(&h);
            for i in 1..=n {
                prop_assert_eq!(prod.alpha(i).truncated(12), f.alpha(i).truncated(12));
            }
            let mut one = HenselState::new(&f, &g0, &h0, &hs, &gs).unwrap();
            let mut other = HenselState::new(&f, &g0, &h0, &hs, &gs).unwrap();
            other.ensure(11).unwrap();
            for k in 1..12 {
                let (gk, hk) = (one.g_coeff(k).unwrap(), one.h_coeff(k).unwrap());
                prop_assert!(gk.is_zero() || gk.deg() < g0.deg());
                prop_assert!(hk.is_zero() || hk.deg() < h0.deg());
                prop_assert_eq!(gk, other.g_coeff(k).unwrap());
                prop_assert_eq!(hk, other.h_coeff(k).unwrap());
            }
        }
    }
}
