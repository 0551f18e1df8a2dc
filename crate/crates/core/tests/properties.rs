use proptest::prelude::*;

use puiseux_core::cli::gate::y_discriminant_gcd;
use puiseux_core::cli::parse_poly;
use puiseux_core::puiseux::{expand, newton_slope, tschirnhaus_shift, verify_product, BranchMode, DEFAULT_FUEL};
use puiseux_core::series::SeriesPoly;
use puiseux_core::splits::{enumerate_homs, normalize_pair, splits_check_expansions, ExpansionAlgebra};
use puiseux_core::SplitOutcome;

/// Monic in `Y` with small integer coefficients; terms are `(c, deg_X, deg_Y)`.
fn input() -> impl Strategy<Value = String> {
    (2usize..5).prop_flat_map(|n| {
        prop::collection::vec((-3i64..4, 0usize..4, 0..n), 1..5).prop_map(move |terms| {
            let mut text = format!("Y^{n}");
            for (c, i, j) in terms {
                text.push_str(&format!(" + {c}*X^{i}*Y^{j}"));
            }
            text
        })
    })
}

fn separable(text: &str) -> Option<SeriesPoly> {
    let f = parse_poly(text).ok()?;
    (y_discriminant_gcd(&f).deg() == 0).then(|| f.to_series_poly())
}

fn order(s: &puiseux_core::series::Series, bound: usize) -> Option<usize> {
    (0..bound).find(|&j| !s.coeff_at(j).is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn expansions_verify(text in input()) {
        let Some(f) = separable(&text) else { return Ok(()) };
        let branches = expand(&f, BranchMode::All, DEFAULT_FUEL).unwrap();
        for b in &branches {
            prop_assert_eq!(b.factors.len(), f.degree());
            prop_assert!(verify_product(&f, b, 16), "{}", text);
        }
    }

    #[test]
    fn shift_and_slope(text in input()) {
        let Some(f) = separable(&text) else { return Ok(()) };
        let (g, _) = tschirnhaus_shift(&f);
        prop_assert!(g.alpha(1).truncated(20).iter().all(|c| c.is_zero()));
        let SplitOutcome::Value((m, p)) = newton_slope(&g, DEFAULT_FUEL).unwrap() else {
            return Err(TestCaseError::fail("split over the rationals"));
        };
        let mut attained = false;
        for i in 1..=g.degree() {
            if let Some(k) = order(g.alpha(i), 64) {
                prop_assert!(k * m >= i * p, "{}: alpha_{} has order {} below slope {}/{}", text, i, k, p, m);
                attained |= k * m == i * p;
            }
        }
        prop_assert!(attained || p == 0);
    }

    #[test]
    fn branch_algebras_split_each_other(text in input()) {
        let Some(f) = separable(&text) else { return Ok(()) };
        let algebras: Vec<ExpansionAlgebra> = expand(&f, BranchMode::All, DEFAULT_FUEL)
            .unwrap()
            .iter()
            .map(ExpansionAlgebra::from_branch)
            .collect();
        for x in &algebras {
            for y in &algebras {
                let w = splits_check_expansions(x, y).expect("branch algebras split each other");
                prop_assert!(w.verify());
                let homs = enumerate_homs(&w);
                prop_assert_eq!(homs.len(), y.dimension());
                prop_assert!(homs.iter().all(|h| h.verify()));
                for (i, h) in homs.iter().enumerate() {
                    prop_assert!(homs[..i].iter().all(|o| o != h));
                }
            }
        }
        if let [a, b, ..] = algebras.as_slice() {
            let nf = normalize_pair(a, b).unwrap();
            prop_assert_eq!(nf.n * nf.common.dimension(), a.dimension());
            prop_assert_eq!(nf.m * nf.common.dimension(), b.dimension());
        }
    }
}
