//! `relbreg <family> --algo <alg> [options]`: run a benchmark and write its
//! checkpoint table.
//!
//! Exit codes: 0 on success, 2 on a usage error, 3 when a solver fails (the
//! table written so far ends with a `# partial: ...` line).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relbreg::bench::{emit_table, run_experiment, Algo, ExperimentSpec, Family, Format};

#[derive(Parser)]
#[command(name = "relbreg", version, about = "Relative-smoothness mirror-descent benchmarks")]
struct Cli {
    #[command(subcommand)]
    family: FamilyCmd,
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Intersection of ellipsoids (objective methods alg3-alg6).
    Iep(Opts),
    /// SVM Lagrange saddle point (operator methods alg1, alg2).
    SvmSaddle(Opts),
    /// Relatively strongly convex quartic (objective methods alg3-alg6).
    Quartic(Opts),
    /// `1/2 |x|^2` on the unit ball (every method).
    Toy(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated, strictly increasing iteration counts.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 100, 1000])]
    checkpoints: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    l0: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    delta0: f64,
    #[arg(long = "r-sq")]
    r_sq: Option<f64>,
    #[arg(long = "max-outer", default_value_t = 1_000_000)]
    max_outer: usize,
    /// SVM regulariser.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value = "csv")]
    format: String,
}

const USAGE: u8 = 2;
const SOLVER_FAILURE: u8 = 3;

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("relbreg: {msg}");
    ExitCode::from(USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (family, o) = match cli.family {
        FamilyCmd::Iep(o) => (Family::Iep, o),
        FamilyCmd::SvmSaddle(o) => (Family::SvmSaddle, o),
        FamilyCmd::Quartic(o) => (Family::Quartic, o),
        FamilyCmd::Toy(o) => (Family::Toy, o),
    };
    let algo: Algo = match o.algo.parse() {
        Ok(a) => a,
        Err(e) => return usage(e),
    };
    let format: Format = match o.format.parse() {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let spec = ExperimentSpec {
        n: o.n,
        m: o.m,
        eps: o.eps,
        seed: o.seed,
        checkpoints: o.checkpoints,
        repeats: o.repeats,
        l0: o.l0,
        delta0: o.delta0,
        r_sq: o.r_sq,
        max_outer: o.max_outer,
        lambda_reg: o.lambda,
        ..ExperimentSpec::new(family, algo)
    };
    if let Err(e) = spec.validate() {
        return usage(e);
    }
    let outcome = match run_experiment(&spec) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };

    let mut sink: Box<dyn Write> = match &o.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return usage(format!("cannot create {}: {e}", path.display())),
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let written = emit_table(&mut sink, &outcome.table, format).and_then(|()| {
        if let Some(msg) = &outcome.failure {
            writeln!(sink, "# partial: {msg}")?;
        }
        sink.flush()?;
        Ok(())
    });
    if let Err(e) = written {
        eprintln!("relbreg: {e}");
        return ExitCode::from(SOLVER_FAILURE);
    }
    match outcome.failure {
        Some(msg) => {
            eprintln!("relbreg: solver failure: {msg}");
            ExitCode::from(SOLVER_FAILURE)
        }
        None => ExitCode::SUCCESS,
    }
}
