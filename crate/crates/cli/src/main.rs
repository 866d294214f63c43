//! `hatsiegel`: JSON front end for the library.
//!
//! Requests are read from `--input FILE` or stdin. Every response is
//! `{"result": ..., "diagnostics": ...}` on stdout. Exit status is 0 on
//! success, 1 when a reported check fails, 2 on a domain or usage error.

mod commands;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hatsiegel::wire::{obj, parse, to_text};
use hatsiegel::{Error, Tolerance};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "hatsiegel",
    version,
    about = "The special Siegel half-space of degree two and line bundles on its abelian surfaces"
)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Read the JSON request from this file instead of stdin.
    #[arg(long, global = true)]
    input: Option<std::path::PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a point {"tau", "z"} of the half-space.
    Point,
    /// Apply {"element"} to {"point"}.
    Act,
    /// Cayley transform of {"point"}, or its inverse on {"disk"}.
    Cayley,
    #[command(subcommand)]
    Group(GroupCommand),
    /// Invariant distance between {"p1"} and {"p2"}.
    Dist,
    /// Points on the geodesic from {"p1"} to {"p2"}.
    Geodesic,
    /// Invariant volume density at {"point"}.
    Volume,
    /// Invariant Laplacian of a named field at {"point"}.
    Laplacian,
    #[command(subcommand)]
    Bundle(BundleCommand),
    #[command(subcommand)]
    Theta(ThetaCommand),
    #[command(subcommand)]
    Picard(PicardCommand),
    /// Run the seeded property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Membership test for {"matrix"}.
    Check,
    /// Split {"element"} into a pair of SL(2, R) matrices.
    Split,
    /// Assemble {"m1", "m2"} into an element.
    Fuse,
    /// Seeded random elements.
    Sample {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = SignChoice::Plus)]
        sign: SignChoice,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SignChoice {
    Plus,
    Any,
}

#[derive(Subcommand)]
enum BundleCommand {
    /// Gram matrices S and E of a form.
    Gram,
    /// Riemann form conditions.
    Check,
    /// Dimension of the space of sections.
    Dim {
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        imtau: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        imz: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        retau: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rez: f64,
    },
    /// Canonical semi-character at {"n"}, and the law against {"m"}.
    Semichar,
    /// Automorphic factor at {"alpha"}, {"z"}.
    Factor,
}

#[derive(Subcommand)]
enum ThetaCommand {
    /// Riemann theta at {"omega"}, {"z"}.
    Eval,
    /// Quasi-periodicity residual for {"m"}, {"k"}.
    Qp,
    /// Principal bridge to the automorphic factor.
    Bridge,
}

#[derive(Subcommand)]
enum PicardCommand {
    /// Dual lattice basis.
    Dual,
    /// Poincare bundle residuals.
    Poincare,
    /// Translation character of {"a"}.
    Translate,
    /// The kernel K(F) of the polarization map.
    Kernel,
    /// Theorem of the square for {"a"}, {"b"}.
    Square,
    /// Curvature form.
    Curvature,
    /// Hodge numbers of the abelian surface.
    Hodge,
}

/// Inputs shared by every handler.
pub struct Ctx {
    pub tol: Tolerance<f64>,
    pub seed: u64,
    input: Option<std::path::PathBuf>,
}

impl Ctx {
    /// The request document from `--input` or stdin.
    pub fn payload(&self) -> hatsiegel::Result<Value> {
        let text = match &self.input {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?,
            None => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Error::Domain(format!("cannot read stdin: {e}")))?;
                s
            }
        };
        let v = parse(&text)?;
        if !v.is_object() {
            return Err(Error::Domain("request must be a JSON object".into()));
        }
        Ok(v)
    }
}

/// Handler output: the response body and whether every reported check passed.
pub struct Response {
    pub result: Value,
    pub diagnostics: serde_json::Map<String, Value>,
    pub passed: bool,
}

fn run(cli: Cli) -> hatsiegel::Result<Response> {
    let tol = Tolerance::new(cli.opts.abs_tol, cli.opts.rel_tol)?;
    let ctx = Ctx { tol, seed: cli.opts.seed, input: cli.opts.input };
    use commands as c;
    match cli.command {
        Command::Point => c::point(&ctx),
        Command::Act => c::act(&ctx),
        Command::Cayley => c::cayley(&ctx),
        Command::Group(g) => match g {
            GroupCommand::Check => c::group_check(&ctx),
            GroupCommand::Split => c::group_split(&ctx),
            GroupCommand::Fuse => c::group_fuse(&ctx),
            GroupCommand::Sample { count, sign } => c::group_sample(&ctx, count, matches!(sign, SignChoice::Any)),
        },
        Command::Dist => c::dist(&ctx),
        Command::Geodesic => c::geodesic(&ctx),
        Command::Volume => c::volume(&ctx),
        Command::Laplacian => c::laplacian(&ctx),
        Command::Bundle(b) => match b {
            BundleCommand::Gram => c::bundle_gram(&ctx),
            BundleCommand::Check => c::bundle_check(&ctx),
            BundleCommand::Dim { kind, imtau, imz, retau, rez } => c::bundle_dim(&ctx, kind, imtau, imz, retau, rez),
            BundleCommand::Semichar => c::bundle_semichar(&ctx),
            BundleCommand::Factor => c::bundle_factor(&ctx),
        },
        Command::Theta(t) => match t {
            ThetaCommand::Eval => c::theta_eval(&ctx),
            ThetaCommand::Qp => c::theta_qp(&ctx),
            ThetaCommand::Bridge => c::theta_bridge(&ctx),
        },
        Command::Picard(p) => match p {
            PicardCommand::Dual => c::picard_dual(&ctx),
            PicardCommand::Poincare => c::picard_poincare(&ctx),
            PicardCommand::Translate => c::picard_translate(&ctx),
            PicardCommand::Kernel => c::picard_kernel(&ctx),
            PicardCommand::Square => c::picard_square(&ctx),
            PicardCommand::Curvature => c::picard_curvature(&ctx),
            PicardCommand::Hodge => c::picard_hodge(&ctx),
        },
        Command::Verify { suite } => c::verify(&ctx, &suite),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(v: &Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", to_text(v));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tolerances =
        obj([("abs_tol", hatsiegel::wire::num(cli.opts.abs_tol)), ("rel_tol", hatsiegel::wire::num(cli.opts.rel_tol))]);
    match run(cli) {
        Ok(mut r) => {
            r.diagnostics.insert("tolerances".into(), tolerances);
            r.diagnostics.insert("passed".into(), Value::from(r.passed));
            emit(&obj([("result", r.result), ("diagnostics", Value::Object(r.diagnostics))]));
            ExitCode::from(if r.passed { 0 } else { 1 })
        }
        Err(e) => {
            let (kind, code) = match &e {
                Error::Domain(_) => ("domain", 2),
                Error::Numeric(_) => ("numeric", 1),
                Error::Overflow(_) => ("overflow", 1),
            };
            let body = obj([("error", obj([("kind", Value::from(kind)), ("message", Value::from(e.to_string()))]))]);
            emit(&body);
            ExitCode::from(code)
        }
    }
}
