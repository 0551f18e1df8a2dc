//! Puiseux expansions of monic separable bivariate polynomials, computed by
//! dynamic evaluation over triangular separable algebras.

pub mod cli;
pub mod error;
pub mod hensel;
pub mod puiseux;
pub mod scalars;
pub mod series;
pub mod splits;
pub mod tower;
pub mod upoly;

pub use error::{Error, Result};
pub use scalars::{Rational, Rationals, Ring};
pub use tower::{AlgElem, Part, SplitOutcome, SplittingRing, TPoly, Tower, TowerHom};
pub use upoly::Poly;
