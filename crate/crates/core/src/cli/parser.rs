//! Bivariate polynomial input: `poly := signed (('+'|'-') signed)*` with
//! `signed := ['+'|'-'] term`, a term being a product of rational constants
//! and powers of `X` and `Y`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::Rational;
use crate::series::SeriesPoly;

/// A polynomial in `K[X][Y]`, monic in `Y`.
#[derive(Clone, PartialEq, Eq)]
pub struct InputPoly {
    pub expr: String,
    /// `(deg_Y, deg_X) -> coefficient`, nonzero entries only.
    pub terms: BTreeMap<(usize, usize), Rational>,
}

impl InputPoly {
    /// Builds from coefficients, checking monicity in `Y`.
    pub fn from_terms(expr: &str, terms: BTreeMap<(usize, usize), Rational>) -> Result<InputPoly> {
        let n = terms.keys().map(|k| k.0).max().unwrap_or(0);
        let lead: Vec<(usize, &Rational)> = terms.iter().filter(|(k, _)| k.0 == n).map(|(k, c)| (k.1, c)).collect();
        let monic = lead.len() == 1 && lead[0].0 == 0 && lead[0].1.is_one();
        if !monic || n == 0 {
            let lc = render_x_poly(&lead.iter().map(|(e, c)| (*e, (*c).clone())).collect::<Vec<_>>());
            return Err(Error::NotMonicInY(lc));
        }
        Ok(InputPoly { expr: expr.to_string(), terms })
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Coefficient of `Y^k` as a dense list in `X`.
    pub fn y_coeff(&self, k: usize) -> Vec<Rational> {
        let xs: Vec<(usize, Rational)> =
            self.terms.iter().filter(|(key, _)| key.0 == k).map(|(key, c)| (key.1, c.clone())).collect();
        let len = xs.iter().map(|(e, _)| e + 1).max().unwrap_or(0);
        let mut out = vec![Rational::zero(); len];
        for (e, c) in xs {
            out[e] = c;
        }
        out
    }

    pub fn to_series_poly(&self) -> SeriesPoly {
        let n = self.degree();
        let rows: Vec<Vec<Rational>> = (1..=n).map(|i| self.y_coeff(n - i)).collect();
        SeriesPoly::from_rational_rows(&rows)
    }

    /// Canonical text, highest power of `Y` first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for ((ey, ex), c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (v, e) in [("X", *ex), ("Y", *ey)] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            let a = c.abs();
            let body = if factors.is_empty() {
                a.to_string()
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{a}*{}", factors.join("*"))
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Debug for InputPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn render_x_poly(terms: &[(usize, Rational)]) -> String {
    let mut t: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (e, c) in terms {
        t.insert((0, *e), c.clone());
    }
    InputPoly { expr: String::new(), terms: t }.render()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn digits(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn exponent(&mut self) -> Result<usize> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let d = self.digits()?;
            d.parse().map_err(|_| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    /// One signed term: `(sign, Y-degree, X-degree, coefficient)`.
    fn term(&mut self) -> Result<((usize, usize), Rational)> {
        let mut coeff = Rational::one();
        let (mut ey, mut ex) = (0usize, 0usize);
        let mut any = false;
        loop {
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let n: Rational = self.digits()?.parse()?;
                    let mut c = n;
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let d: Rational = self.digits()?.parse()?;
                        if d.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        c = &c / &d;
                    }
                    coeff = &coeff * &c;
                }
                Some(v @ (b'X' | b'Y' | b'x' | b'y')) => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    if v.eq_ignore_ascii_case(&b'X') {
                        ex += e;
                    } else {
                        ey += e;
                    }
                }
                _ if any => return Err(self.err("expected a factor after '*'")),
                _ => return Err(self.err("expected a number, X or Y")),
            }
            any = true;
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    any = true;
                }
                Some(b'0'..=b'9' | b'X' | b'Y' | b'x' | b'y') => {}
                _ => break,
            }
        }
        Ok(((ey, ex), coeff))
    }
}

/// Parses and checks monicity in `Y`.
pub fn parse_poly(text: &str) -> Result<InputPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut terms: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut sign = Rational::one();
    loop {
        if let Some(op @ (b'+' | b'-')) = p.peek() {
            p.pos += 1;
            if op == b'-' {
                sign = -sign;
            }
        }
        let (key, c) = p.term()?;
        let entry = terms.entry(key).or_insert_with(Rational::zero);
        *entry += &(&sign * &c);
        match p.peek() {
            None => break,
            Some(b'+') => sign = Rational::one(),
            Some(b'-') => sign = -Rational::one(),
            Some(_) => return Err(p.err("expected '+' or '-'")),
        }
        p.pos += 1;
    }
    terms.retain(|_, c| !c.is_zero());
    InputPoly::from_terms(text, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn example_input() {
        let f = parse_poly("Y^4 - 3*Y^2 + X*Y + X^2").unwrap();
        assert_eq!(f.degree(), 4);
        assert_eq!(f.y_coeff(2), vec![Rational::from_int(-3)]);
        assert_eq!(f.y_coeff(1), vec![Rational::zero(), Rational::one()]);
        assert_eq!(f.y_coeff(0), vec![Rational::zero(), Rational::zero(), Rational::one()]);
        assert_eq!(f.render(), "Y^4 - 3*Y^2 + X*Y + X^2");
    }

    #[test]
    fn degenerate_and_errors() {
        let y = parse_poly("Y").unwrap();
        assert_eq!(y.degree(), 1);
        assert!(y.y_coeff(0).is_empty());
        assert!(matches!(parse_poly("2*Y^2 - X"), Err(Error::NotMonicInY(m)) if m.contains('2')));
        assert!(matches!(parse_poly("Y^2 + X*Y^2"), Err(Error::NotMonicInY(_))));
        assert!(matches!(parse_poly("Y^2 + "), Err(Error::Parse { position: 6, .. })));
        assert!(matches!(parse_poly("Y^2 $ X"), Err(Error::Parse { position: 4, .. })));
        assert_eq!(parse_poly("Y^2 - 1/2X").unwrap().y_coeff(0), vec![Rational::zero(), Rational::new(-1, 2)]);
        assert_eq!(parse_poly("Y^2 + -3*X - -X").unwrap().render(), "Y^2 - 2*X");
        assert!(parse_poly("Y^2 - - X").is_ok());
        assert!(matches!(parse_poly("Y^2 + - - X"), Err(Error::Parse { position: 8, .. })));
    }

    fn arb_poly() -> impl Strategy<Value = InputPoly> {
        (1usize..5, prop::collection::vec(((0usize..5), (0usize..6), -9i64..10, 1i64..5), 0..8)).prop_map(|(n, ts)| {
            let mut terms = BTreeMap::new();
            terms.insert((n, 0), Rational::one());
            for (ey, ex, a, b) in ts {
                if ey < n && a != 0 {
                    terms.insert((ey, ex), Rational::new(a, b));
                }
            }
            InputPoly::from_terms("", terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn render_round_trip(f in arb_poly()) {
            let g = parse_poly(&f.render()).unwrap();
            prop_assert_eq!(g.terms, f.terms);
        }
    }
}
