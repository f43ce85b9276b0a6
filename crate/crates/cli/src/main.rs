use std::io::{self, BufRead};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syncrel::commands::{
    cmd_check, cmd_rewrite, cmd_run, cmd_step, load_plan, Extension, RunConfig, ScanOrder, DEFAULT_BOUND, EXIT_ERROR,
};
use syncrel::suites::Suite;
use syncrel::trace::Verbosity;
use syncrel_core::setrel::DEFAULT_MAX_SET_SIZE;

#[derive(Parser)]
#[command(name = "syncrel", version, about = "Synchronous set relations and a plan executive")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a plan against an event script.
    Run {
        plan: PathBuf,
        events: PathBuf,
        /// Micro steps allowed per macro step.
        #[arg(long, default_value_t = DEFAULT_BOUND as u64, value_parser = clap::value_parser!(u64).range(1..))]
        bound: u64,
        #[arg(long, value_enum, default_value_t = Verbosity::Micro)]
        verbosity: Verbosity,
        /// Write trace.txt and final.dump into this directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ScanOrder::Plan)]
        scan: ScanOrder,
    },
    /// Step a plan interactively.
    Step {
        plan: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Run an oracle suite.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Rewrite a term set with a rule file.
    Rewrite {
        system: PathBuf,
        /// A term set such as `{A(0), B(1)}`.
        input: String,
        #[command(flatten)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Largest set whose subsets are enumerated.
        #[arg(long, default_value_t = DEFAULT_MAX_SET_SIZE)]
        limit: usize,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Mode {
    #[arg(long)]
    sync: bool,
    #[arg(long = "async")]
    asynchronous: bool,
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    serialize: bool,
}

impl Mode {
    fn extension(&self) -> Extension {
        if self.asynchronous {
            Extension::Async
        } else if self.parallel {
            Extension::Parallel
        } else if self.serialize {
            Extension::Serialize
        } else {
            Extension::Sync
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Run {
            plan,
            events,
            bound,
            verbosity,
            output,
            scan,
        } => {
            let cfg = RunConfig {
                bound: bound as usize,
                verbosity,
                output,
                scan,
                ..RunConfig::new(plan, events)
            };
            cmd_run(&cfg, &mut out, &mut err)
        }
        Command::Step { plan, bound } => match load_plan(&plan) {
            Ok(state) => {
                let mut input = io::stdin().lock();
                let input: &mut dyn BufRead = &mut input;
                cmd_step(state, bound, input, &mut out).unwrap_or_else(|e| {
                    eprintln!("error: {e}");
                    EXIT_ERROR
                })
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        Command::Check { suite, seed, cases } => cmd_check(suite, seed, cases, &mut out),
        Command::Rewrite {
            system,
            input,
            mode,
            steps,
            limit,
        } => cmd_rewrite(&system, &input, mode.extension(), steps, limit, &mut out, &mut err),
    };
    ExitCode::from(code)
}
