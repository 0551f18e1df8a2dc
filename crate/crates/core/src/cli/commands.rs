//! Subcommands and exit codes.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cli::gate::separability_gate;
use crate::cli::parser::{parse_poly, InputPoly};
use crate::cli::render::{branch_json, branch_text, BranchView, JsonReport};
use crate::error::Error;
use crate::puiseux::{check_root, expand, verify_product, Branch, BranchMode, DEFAULT_FUEL};
use crate::series::SeriesPoly;
use crate::splits::{enumerate_homs, normalize_pair, splits_check_expansions, ExpansionAlgebra};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_SEPARABLE: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "puiseux", version, about = "Puiseux expansions over triangular separable algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand every root of F(X,Y) as a series in a fractional power of X.
    Expand(Common),
    /// Check the product identity and each root up to T^order.
    Verify(Common),
    /// Check that the algebras of all branches split each other.
    Splits(Common),
    /// Write two branch algebras as powers of a common algebra.
    Normalize {
        #[command(flatten)]
        common: Common,
        /// Branch numbers (1-based) to compare.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Branches {
    All,
    First,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Polynomial, e.g. "Y^2 - X^3".
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub expr: Option<String>,
    /// File holding the polynomial.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Exponent bound in X for display, or the T-order for verification.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Branches::All)]
    pub branches: Branches,
    /// Replace a non-separable input by its separable associate.
    #[arg(long)]
    pub make_separable: bool,
    /// Largest order searched for a unit coefficient.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Drop degree-1 levels from the displayed algebras.
    #[arg(long)]
    pub prune_trivial_levels: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotSeparableInput(_) => EXIT_NOT_SEPARABLE,
        Error::FuelExhausted(_) => EXIT_FUEL,
        _ => EXIT_USAGE,
    }
}

struct Prepared {
    input: InputPoly,
    f: SeriesPoly,
    branches: Vec<Branch>,
}

fn prepare(c: &Common) -> Result<Prepared, Error> {
    let text = match (&c.expr, &c.input) {
        (Some(e), _) => e.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)
            .map_err(|e| Error::Parse { position: 0, message: format!("cannot read {}: {e}", p.display()) })?,
        (None, None) => return Err(Error::Parse { position: 0, message: "no input".into() }),
    };
    let input = separability_gate(&parse_poly(text.trim())?, c.make_separable)?;
    let f = input.to_series_poly();
    let mode = match c.branches {
        Branches::All => BranchMode::All,
        Branches::First => BranchMode::First,
    };
    let branches = expand(&f, mode, c.fuel)?;
    Ok(Prepared { input, f, branches })
}

fn cmd_expand(c: &Common, out: &mut dyn Write) -> std::io::Result<i32> {
    let p = match prepare(c) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let views: Vec<BranchView> = p.branches.iter().map(|b| BranchView::new(b, c.prune_trivial_levels)).collect();
    match c.format {
        Format::Text => {
            writeln!(out, "F(X,Y) = {}", p.input.render())?;
            for (i, v) in views.iter().enumerate() {
                writeln!(out, "{}", branch_text(i, v, c.order))?;
            }
        }
        Format::Json => {
            let report = JsonReport {
                input: p.input.render(),
                branches: views.iter().map(|v| branch_json(v, c.order)).collect(),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(c: &Common, out: &mut dyn Write) -> std::io::Result<i32> {
    let p = match prepare(c) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let mut ok = true;
    for (i, b) in p.branches.iter().enumerate() {
        let product = verify_product(&p.f, b, c.order);
        let roots = b.etas().iter().filter(|e| check_root(&p.f, &b.tower, b.ramification, e, c.order)).count();
        ok &= product && roots == b.factors.len();
        writeln!(
            out,
            "branch {}: dimension {}, ramification {}, product identity mod T^{}: {}, roots: {}/{}",
            i + 1,
            b.dimension(),
            b.ramification,
            c.order,
            if product { "ok" } else { "FAILED" },
            roots,
            b.factors.len()
        )?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_splits(c: &Common, out: &mut dyn Write) -> std::io::Result<i32> {
    let p = match prepare(c) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let algs: Vec<ExpansionAlgebra> = p.branches.iter().map(ExpansionAlgebra::from_branch).collect();
    let mut ok = true;
    for (i, a) in algs.iter().enumerate() {
        for (j, r) in algs.iter().enumerate() {
            match splits_check_expansions(a, r) {
                Some(w) => writeln!(
                    out,
                    "branch {} splits branch {}: {} homomorphisms",
                    i + 1,
                    j + 1,
                    enumerate_homs(&w).len()
                )?,
                None => {
                    ok = false;
                    writeln!(out, "branch {} does not split branch {}", i + 1, j + 1)?
                }
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_normalize(c: &Common, pair: Option<&[usize]>, out: &mut dyn Write) -> std::io::Result<i32> {
    let p = match prepare(c) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let count = p.branches.len();
    let (i, j) = match pair {
        Some([i, j]) => (*i, *j),
        _ => (1, count.min(2)),
    };
    if i == 0 || j == 0 || i > count || j > count {
        eprintln!("error: branch numbers must lie in 1..={count}");
        return Ok(EXIT_USAGE);
    }
    let a = ExpansionAlgebra::from_branch(&p.branches[i - 1]);
    let b = ExpansionAlgebra::from_branch(&p.branches[j - 1]);
    match normalize_pair(&a, &b) {
        Ok(nf) => {
            writeln!(out, "common algebra R, dimension {}:", nf.common.dimension())?;
            for l in nf.common.tower.render() {
                writeln!(out, "  {l}")?;
            }
            writeln!(out, "branch {i} ≅ R^{} (dimension {})", nf.n, a.dimension())?;
            writeln!(out, "branch {j} ≅ R^{} (dimension {})", nf.m, b.dimension())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_VERIFY)
        }
    }
}

fn fail(e: &Error) -> std::io::Result<i32> {
    eprintln!("error: {e}");
    Ok(exit_code(e))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let res = match &cli.command {
        Command::Expand(c) => cmd_expand(c, out),
        Command::Verify(c) => cmd_verify(c, out),
        Command::Splits(c) => cmd_splits(c, out),
        Command::Normalize { common, pair } => cmd_normalize(common, pair.as_deref(), out),
    };
    match res {
        Ok(code) => code,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
