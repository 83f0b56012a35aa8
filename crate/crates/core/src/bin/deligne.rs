//! Command line front end: each subcommand runs a suite of checks and writes one JSON
//! record per check, sorted by id, followed by a summary record.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use deligne::bundle_data::BundleFile;
use deligne::holonomy::DEFAULT_STEPS;
use deligne::report::{
    period_symbolic, prepare, run_suite, verify_all, CoverSpec, Report, RunConfig, DEFAULT_SAMPLES,
};
use deligne::Error;

#[derive(Parser)]
#[command(name = "deligne", version, about = "Verify tame symbols and hermitian Deligne cocycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// First function, a rational function of z with Gaussian rational coefficients.
    #[arg(long, global = true, default_value = "z")]
    f: String,
    /// Second function.
    #[arg(long, global = true, default_value = "z-3")]
    g: String,
    /// Sector cover about 0 as N,width,inner,outer.
    #[arg(long, global = true, default_value = "3,4.5,0.5,1.5")]
    cover: String,
    /// TOML file with transition functions and optional metric exponents.
    #[arg(long, global = true)]
    bundle: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance; each suite has its own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Quadrature panels per loop arc.
    #[arg(long, global = true, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tame symbol cocycle, cup product and holonomy.
    Tame,
    /// Hermitian tame symbol.
    Hermitian,
    /// Holonomy around the puncture.
    Holonomy,
    /// Symbol of a function and a line bundle.
    SymbolFl,
    /// Symbol of two line bundles.
    SymbolLl,
    /// Chern class, canonical connection and metrized cocycles of a bundle.
    Bundle,
    /// Heisenberg invariants and their pullbacks.
    Heisenberg,
    /// Big period, projections and extension class of the mixed Hodge structure.
    Period {
        /// Only print the canonical tensors with formal x, y, z.
        #[arg(long)]
        symbolic: bool,
    },
    /// Compatibility of the analytic and metric connections.
    Obstruction,
    /// The full invariant suite on the fixture set.
    VerifyAll,
}

fn suite_name(c: &Command) -> &'static str {
    match c {
        Command::Tame => "tame",
        Command::Hermitian => "hermitian",
        Command::Holonomy => "holonomy",
        Command::SymbolFl => "symbol-fl",
        Command::SymbolLl => "symbol-ll",
        Command::Bundle => "bundle",
        Command::Heisenberg => "heisenberg",
        Command::Period { .. } => "period",
        Command::Obstruction => "obstruction",
        Command::VerifyAll => "verify-all",
    }
}

fn config(c: &Common) -> Result<RunConfig, Error> {
    let bundle = match &c.bundle {
        Some(p) => {
            let src = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {}", p.display(), e)))?;
            Some(BundleFile::from_toml(&src)?)
        }
        None => None,
    };
    Ok(RunConfig {
        f: c.f.clone(),
        g: c.g.clone(),
        cover: c.cover.parse::<CoverSpec>()?,
        bundle,
        seed: c.seed,
        tol: c.tol,
        steps: c.steps.max(1),
        samples: DEFAULT_SAMPLES,
    })
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cfg = config(&cli.common)?;
    let mut rep = Report::new();
    match &cli.command {
        Command::VerifyAll => return Ok(verify_all(cfg.seed, cfg.steps)),
        Command::Period { symbolic: true } => period_symbolic(&mut rep),
        cmd => {
            let inp = prepare(&cfg)?;
            run_suite(suite_name(cmd), &inp, &cfg, &mut rep)?;
        }
    }
    Ok(rep)
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match run(&cli) {
        Ok(rep) => {
            let code = if rep.passed() { 0 } else { 1 };
            (rep.to_lines(), code)
        }
        Err(e) => {
            let kind = format!("{:?}", e);
            let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
            let rec = json!({ "error": { "kind": kind, "message": e.to_string(), "command": suite_name(&cli.command) } });
            (format!("{}\n", rec), 2)
        }
    };
    if let Err(e) = emit(&cli.common.out, &text) {
        eprintln!("cannot write report: {}", e);
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
