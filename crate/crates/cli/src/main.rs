//! `dgalab`: command-line access to the DGA computations.
//!
//! Exit codes: 0 property holds or command succeeded, 1 property fails,
//! 2 inconclusive, 3 input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dgalab::Exec;

use commands::{Ctx, Failure, Outcome};
use report::{Exit, Report};

#[derive(Parser)]
#[command(name = "dgalab", version, about = "Exact computations with Sullivan-type DGAs over Q")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Disable data-parallel execution.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a .dga file: d² = 0, structure, fundamental class.
    Check { file: String },
    /// Cohomology dimensions and representatives.
    Cohom {
        file: String,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        upto: Option<u32>,
    },
    /// Cohomology class of a cocycle expression.
    Class {
        file: String,
        #[arg(long)]
        expr: String,
    },
    /// Poincaré duality check against the fundamental class.
    Poincare {
        file: String,
        /// Also check that cohomology vanishes just above the formal dimension.
        #[arg(long)]
        spot_check: bool,
    },
    /// Middle-degree intersection form, signature and Lagrangian.
    Intersection {
        file: String,
        /// Scale the fundamental class by this rational.
        #[arg(long)]
        scale: Option<String>,
        /// Ignore `basis` lines and use computed representatives.
        #[arg(long)]
        canonical: bool,
    },
    /// Try to certify that every self-map has degree in {-1, 0, 1}.
    Inflexible {
        file: String,
        #[arg(long)]
        max_splits: Option<u32>,
        /// Write the branch tree as JSON to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Tensor product of two DGAs, written as a .dga file.
    Tensor {
        left: String,
        right: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Ranks of rational homotopy groups read off the generators.
    Homotopy {
        file: String,
        #[arg(long)]
        upto: Option<u32>,
    },
    /// Propagate mapping-degree facts over a catalog.
    Degsets { catalog: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Cohom { .. } => "cohom",
            Command::Class { .. } => "class",
            Command::Poincare { .. } => "poincare",
            Command::Intersection { .. } => "intersection",
            Command::Inflexible { .. } => "inflexible",
            Command::Tensor { .. } => "tensor",
            Command::Homotopy { .. } => "homotopy",
            Command::Degsets { .. } => "degsets",
        }
    }
}

fn run(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome, Failure> {
    match cmd {
        Command::Check { file } => commands::check(ctx, file),
        Command::Cohom { file, degree, upto } => commands::cohom(ctx, file, *degree, *upto),
        Command::Class { file, expr } => commands::class(ctx, file, expr),
        Command::Poincare { file, spot_check } => commands::poincare(ctx, file, *spot_check),
        Command::Intersection { file, scale, canonical } => commands::intersection(ctx, file, scale.as_deref(), *canonical),
        Command::Inflexible { file, max_splits, trace } => commands::inflexible(ctx, file, *max_splits, trace.as_deref()),
        Command::Tensor { left, right, output } => commands::tensor(ctx, left, right, output),
        Command::Homotopy { file, upto } => commands::homotopy(ctx, file, *upto),
        Command::Degsets { catalog } => commands::degsets(ctx, catalog),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::InputError.code() as u8 } else { 0 });
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let mut ctx = Ctx { exec, inputs: Vec::new() };
    let result = run(&cli.command, &mut ctx);
    let (exit, report) = match result {
        Ok(o) => {
            if !cli.json {
                print!("{}", o.text);
                if let Some(t) = &o.trace {
                    println!("trace written to {t}");
                }
            }
            let r = Report {
                command: cli.command.name().to_string(),
                inputs: ctx.inputs,
                exit_code: o.exit.code(),
                verdict: o.verdict,
                payload: o.payload,
                trace: o.trace,
                error: None,
            };
            (o.exit, r)
        }
        Err(Failure(msg)) => {
            if !cli.json {
                eprintln!("error: {msg}");
            }
            let r = Report {
                command: cli.command.name().to_string(),
                inputs: ctx.inputs,
                exit_code: Exit::InputError.code(),
                verdict: "error".to_string(),
                payload: serde_json::json!({}),
                trace: None,
                error: Some(msg),
            };
            (Exit::InputError, r)
        }
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    }
    ExitCode::from(exit.code() as u8)
}
