//! Command-line front end.

pub mod commands;
pub mod gate;
pub mod parser;
pub mod render;

pub use commands::run;
pub use gate::separability_gate;
pub use parser::{parse_poly, InputPoly};
