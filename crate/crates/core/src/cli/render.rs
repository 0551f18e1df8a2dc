//! Text and JSON views of expansion results.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use serde::Serialize;

use crate::puiseux::Branch;
use crate::scalars::Rational;
use crate::tower::{AlgElem, Tower, TowerHom};

/// A branch as shown to the user, optionally with degree-1 levels removed.
pub struct BranchView {
    pub tower: Arc<Tower>,
    pub ramification: usize,
    map: Option<TowerHom>,
    branch: Branch,
}

impl BranchView {
    pub fn new(branch: &Branch, prune: bool) -> BranchView {
        let (tower, map) = if prune {
            let (t, h) = branch.tower.prune();
            (t, Some(h))
        } else {
            (branch.tower.clone(), None)
        };
        BranchView { tower, ramification: branch.ramification, map, branch: branch.clone() }
    }

    /// Nonzero coefficients of root `k` with X-exponent below `order`, as
    /// `(T-index, coefficient)`.
    pub fn terms(&self, k: usize, order: usize) -> Vec<(usize, AlgElem)> {
        let eta = &self.branch.factors[k].eta;
        (0..order * self.ramification)
            .filter_map(|j| {
                let c = eta.coeff_at(j);
                let c = match &self.map {
                    Some(h) => h.apply(&c),
                    None => c,
                };
                (!c.is_zero()).then_some((j, c))
            })
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.branch.factors.len()
    }

    fn exponent(&self, j: usize) -> (usize, usize) {
        let g = j.gcd(&self.ramification);
        (j / g, self.ramification / g)
    }
}

fn x_power((u, v): (usize, usize)) -> String {
    match (u, v) {
        (0, _) => String::new(),
        (1, 1) => "X".into(),
        (u, 1) => format!("X^{u}"),
        (u, v) => format!("X^({u}/{v})"),
    }
}

/// `(Y - η)` truncated, in the style `Y + (-b - 1/6)*X + … `.
pub fn factor_text(view: &BranchView, k: usize, order: usize) -> String {
    let names = view.tower.names();
    let mut out = String::from("(Y");
    for (j, c) in view.terms(k, order) {
        let body = (-&c).render_with(&names);
        let (neg, body) = match body.strip_prefix('-') {
            Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
            _ => (false, body),
        };
        let mono = x_power(view.exponent(j));
        let term = match (mono.is_empty(), body.contains(' '), body == "1") {
            (true, true, _) => format!("({body})"),
            (true, false, _) => body,
            (false, _, true) => mono,
            (false, true, false) => format!("({body})*{mono}"),
            (false, false, false) => format!("{body}*{mono}"),
        };
        out.push_str(if neg { " - " } else { " + " });
        out.push_str(&term);
    }
    out.push_str(" + …)");
    out
}

pub fn branch_text(index: usize, view: &BranchView, order: usize) -> String {
    let mut lines = vec![format!(
        "branch {}: dimension {}, ramification {}",
        index + 1,
        view.tower.dimension(),
        view.ramification
    )];
    let tower_lines = view.tower.render();
    if tower_lines.is_empty() {
        lines.push("  Q".into());
    }
    lines.extend(tower_lines.into_iter().map(|l| format!("  {l}")));
    lines.push("  F(X,Y) =".into());
    for k in 0..view.degree() {
        lines.push(format!("    {}", factor_text(view, k, order)));
    }
    lines.join("\n")
}

#[derive(Serialize)]
pub struct JsonLevel {
    pub gen: String,
    pub poly: String,
}

#[derive(Serialize)]
pub struct JsonTerm {
    pub coeff: BTreeMap<String, Rational>,
    pub exponent: Rational,
}

#[derive(Serialize)]
pub struct JsonBranch {
    pub algebra: Vec<JsonLevel>,
    pub dimension: usize,
    pub ramification: usize,
    /// Terms of each root `η`; the factor is `Y - η`.
    pub expansions: Vec<Vec<JsonTerm>>,
}

#[derive(Serialize)]
pub struct JsonReport {
    pub input: String,
    pub branches: Vec<JsonBranch>,
}

fn monomial_key(e: &[usize], names: &[String]) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(k, _)| **k > 0)
        .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn branch_json(view: &BranchView, order: usize) -> JsonBranch {
    let names = view.tower.names();
    let algebra = view
        .tower
        .render()
        .into_iter()
        .zip(&names)
        .map(|(line, n)| {
            let poly = line.split_once(": ").map(|x| x.1).unwrap_or(&line);
            JsonLevel { gen: n.clone(), poly: poly.trim_end_matches(" = 0").to_string() }
        })
        .collect();
    let expansions = (0..view.degree())
        .map(|k| {
            view.terms(k, order)
                .into_iter()
                .map(|(j, c)| {
                    let (u, v) = view.exponent(j);
                    JsonTerm {
                        coeff: c.terms().into_iter().map(|(e, r)| (monomial_key(&e, &names), r)).collect(),
                        exponent: Rational::new(u as i64, v as i64),
                    }
                })
                .collect()
        })
        .collect();
    JsonBranch { algebra, dimension: view.tower.dimension(), ramification: view.ramification, expansions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parser::parse_poly;
    use crate::puiseux::{expand, BranchMode, DEFAULT_FUEL};

    #[test]
    fn half_integer_exponents() {
        let f = parse_poly("Y^2 - X").unwrap().to_series_poly();
        let b = &expand(&f, BranchMode::All, DEFAULT_FUEL).unwrap()[0];
        let v = BranchView::new(b, false);
        assert_eq!(factor_text(&v, 0, 2), "(Y - a*X^(1/2) + …)");
        assert_eq!(factor_text(&v, 1, 2), "(Y + a*X^(1/2) + …)");
        let j = branch_json(&v, 2);
        assert_eq!(j.algebra[0].poly, "a^2 - 1");
        assert_eq!(j.expansions[0][0].exponent, Rational::new(1, 2));
        assert_eq!(j.expansions[1][0].coeff.get("a"), Some(&Rational::from_int(-1)));
    }
}
