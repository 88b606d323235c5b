use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csmrf::cli::{self, Outcome, VerifyFlags};
use csmrf::factorizer::DEFAULT_RESIDUAL_THRESHOLD;
use csmrf::format::write_distribution;
use csmrf::independence::DEFAULT_TOL;
use csmrf::{testkit, Error};

/// Context-specific independence analysis for small discrete distributions.
#[derive(Parser)]
#[command(name = "csmrf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Tolerance {
    /// Relative tolerance for independence tests.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Clone, Copy)]
struct VerifyArgs {
    #[command(flatten)]
    tol: Tolerance,
    /// Largest log-probability error accepted as an exact representation.
    #[arg(long, default_value_t = DEFAULT_RESIDUAL_THRESHOLD)]
    residual_threshold: f64,
    /// Match features to contexts only when the context scope lies inside the feature scope.
    #[arg(long)]
    strict_matching: bool,
}

impl VerifyArgs {
    fn flags(self, json: bool) -> VerifyFlags {
        VerifyFlags {
            tol: self.tol.tol,
            residual_threshold: self.residual_threshold,
            strict_matching: self.strict_matching,
            json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a distribution file and summarize it.
    Validate { file: PathBuf },
    /// List every context-specific independence that holds.
    Csis {
        file: PathBuf,
        /// Only contexts over subsets of these variables (`a,c`; `-` for none).
        #[arg(long)]
        context_vars: Option<String>,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Pairwise graph of the dependency model reduced to a context.
    Graph {
        file: PathBuf,
        /// Context such as `c=0,d=1`; empty by default.
        #[arg(long)]
        context: Option<String>,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Check the preconditions and build and validate the context-specific factorization.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        args: VerifyArgs,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Write the context-specific feature set with fitted weights.
    Factorize {
        file: PathBuf,
        #[arg(long)]
        context_vars: Option<String>,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter counts of the saturated, CI-pruned and CSI-pruned models.
    Report {
        file: PathBuf,
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// Write a built-in fixture as a distribution file.
    EmitFixture {
        /// One of: uniform, coins, d2, d2-flipped, chain, xor.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit_fixture(name: &str, out: Option<PathBuf>) -> Result<Outcome, Error> {
    let p = testkit::fixture(name).ok_or_else(|| Error::Parse {
        line: 0,
        message: format!("unknown fixture `{name}`"),
    })?;
    let text = write_distribution(&p, &[("description", name)]);
    match out {
        Some(path) => {
            std::fs::write(&path, text)?;
            Ok(Outcome {
                stdout: String::new(),
                stderr: String::new(),
                code: 0,
            })
        }
        None => Ok(Outcome {
            stdout: text,
            stderr: String::new(),
            code: 0,
        }),
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Validate { file } => cli::cmd_validate(&file),
        Command::Csis {
            file,
            context_vars,
            tol,
        } => cli::cmd_csis(&file, context_vars.as_deref(), tol.tol),
        Command::Graph { file, context, tol } => cli::cmd_graph(&file, context.as_deref(), tol.tol),
        Command::Verify { file, args, json } => cli::cmd_verify(&file, args.flags(json)),
        Command::Factorize {
            file,
            context_vars,
            tol,
            out,
        } => cli::cmd_factorize(&file, context_vars.as_deref(), tol.tol, out.as_deref()),
        Command::Report { file, args } => cli::cmd_report(&file, args.flags(false)),
        Command::EmitFixture { name, out } => emit_fixture(&name, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            let _ = std::io::stdout().flush();
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
