//! The four subcommands, written against generic readers and writers so
//! they can be driven from tests.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use syncrel_core::plexil::exec::{execute_with, micro_with_order, quiescence_with, Event, MicroReport, TraceHalt};
use syncrel_core::plexil::{compile, parse_plan, ExecError, ExecutionState, QualifiedName};
use syncrel_core::rewrite::parse_rules;
use syncrel_core::setrel::{
    async_ext, max_redexes, nfold, parallel_ext, serialize, sync_ext, SetRelError, SetRelation, Uniform,
};
use syncrel_core::term::parse_termset;
use syncrel_core::TermSet;

use crate::events::{parse_event, parse_events};
use crate::suites::{run_suite, Suite};
use crate::trace::{micro_line, render, Verbosity};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_SPURIOUS_LOOP: u8 = 2;
pub const EXIT_BOUND: u8 = 3;
pub const EXIT_TOO_LARGE: u8 = 4;

pub const DEFAULT_BOUND: usize = 10_000;

/// Node scan order used inside each micro step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanOrder {
    #[default]
    Plan,
    Reverse,
    Sorted,
}

impl ScanOrder {
    fn nodes(self, state: &ExecutionState) -> Option<Vec<QualifiedName>> {
        let mut ids = state.plan.node_ids().to_vec();
        match self {
            ScanOrder::Plan => return None,
            ScanOrder::Reverse => ids.reverse(),
            ScanOrder::Sorted => ids.sort(),
        }
        Some(ids)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub plan: PathBuf,
    pub script: PathBuf,
    pub bound: usize,
    pub verbosity: Verbosity,
    /// Directory for `trace.txt` and `final.dump`; standard output if absent.
    pub output: Option<PathBuf>,
    pub scan: ScanOrder,
}

impl RunConfig {
    pub fn new(plan: impl Into<PathBuf>, script: impl Into<PathBuf>) -> Self {
        RunConfig {
            plan: plan.into(),
            script: script.into(),
            bound: DEFAULT_BOUND,
            verbosity: Verbosity::Micro,
            output: None,
            scan: ScanOrder::Plan,
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_plan(path: &Path) -> Result<ExecutionState, String> {
    let text = read(path)?;
    let plan = parse_plan(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    compile(&plan).map_err(|e| format!("{}: {e}", path.display()))
}

fn exit_for(e: &ExecError) -> u8 {
    match e {
        ExecError::SpuriousLoop { .. } => EXIT_SPURIOUS_LOOP,
        ExecError::BoundExhausted { .. } => EXIT_BOUND,
        _ => EXIT_ERROR,
    }
}

/// The micro steps between the two equal states of a spurious loop.
fn cycle_report(reports: &[MicroReport], first: usize, repeat: usize) -> String {
    let mut out = format!(
        "spurious loop: the state after micro step {repeat} equals the state after micro step {first}\ncycle:\n"
    );
    for (i, r) in reports.iter().enumerate().take(repeat).skip(first) {
        out.push_str(&format!("  {}\n", micro_line(i + 1, r)));
    }
    out
}

/// Parse, compile and execute a plan against an event script.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    if cfg.bound == 0 {
        let _ = writeln!(err, "error: the micro bound must be at least 1");
        return EXIT_ERROR;
    }
    let loaded = load_plan(&cfg.plan).and_then(|s| {
        let text = read(&cfg.script)?;
        let script = parse_events(&text).map_err(|e| format!("{}: {e}", cfg.script.display()))?;
        Ok((s, script.events))
    });
    let (state, events) = match loaded {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let order = cfg.scan.nodes(&state);
    let result = execute_with(&state, &events, cfg.bound, order.as_deref(), &mut |_, _, _| {});
    let (trace, halt) = match result {
        Ok(t) => (t, None),
        Err(TraceHalt { trace, error }) => (trace, Some(error)),
    };
    let rendered = render(&trace.records, cfg.verbosity);
    let dump = trace.final_state.dump();
    let written = match &cfg.output {
        Some(dir) => fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join("trace.txt"), &rendered))
            .and_then(|_| fs::write(dir.join("final.dump"), &dump))
            .map_err(|e| format!("{}: {e}", dir.display())),
        None => write!(out, "{rendered}-- final state --\n{dump}").map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_ERROR;
    }
    let Some(error) = halt else {
        return EXIT_OK;
    };
    let _ = writeln!(err, "halted in macro step {}: {error}", trace.records.len());
    if let (ExecError::SpuriousLoop { first, repeat }, Some(last)) = (&error, trace.records.last()) {
        let _ = write!(err, "{}", cycle_report(&last.reports, *first, *repeat));
    }
    exit_for(&error)
}

fn print_reports(out: &mut dyn Write, start: usize, reports: &[MicroReport]) -> std::io::Result<()> {
    for (i, r) in reports.iter().enumerate() {
        writeln!(out, "{}", micro_line(start + i + 1, r))?;
    }
    Ok(())
}

fn show(out: &mut dyn Write, state: &ExecutionState, id: Option<&str>) -> std::io::Result<()> {
    let dump = state.dump();
    let Some(id) = id else {
        return write!(out, "{dump}");
    };
    let prefix = format!("{id} ");
    let lines: Vec<&str> = dump.lines().filter(|l| l.starts_with(&prefix)).collect();
    if lines.is_empty() {
        writeln!(out, "no node, variable or binding named {id}")
    } else {
        lines.iter().try_for_each(|l| writeln!(out, "{l}"))
    }
}

/// Interactive session over `input`. Commands: `event n=v,...`, `micro`,
/// `quiesce`, `show [id]`, `quit`.
pub fn cmd_step(
    mut state: ExecutionState,
    bound: usize,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> std::io::Result<u8> {
    let mut steps = 0;
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(EXIT_OK);
        }
        let (cmd, arg) = match line.trim().split_once(char::is_whitespace) {
            Some((c, a)) => (c, Some(a.trim())),
            None => (line.trim(), None),
        };
        match cmd {
            "" => {}
            "quit" | "exit" => return Ok(EXIT_OK),
            "event" => match parse_event(arg.unwrap_or("")) {
                Ok(ev) => {
                    apply_event(&mut state, &ev);
                    writeln!(out, "applied {} binding(s)", ev.len())?;
                }
                Err(e) => writeln!(out, "bad event: {e}")?,
            },
            "micro" => match micro_with_order(&state, state.plan.node_ids()) {
                Ok((_, r)) if r.is_empty() => writeln!(out, "no rules fired")?,
                Ok((next, r)) => {
                    steps += 1;
                    writeln!(out, "{}", micro_line(steps, &r))?;
                    state = next;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "quiesce" => match quiescence_with(&state, bound, None, &mut |_, _, _| {}) {
                Ok((next, reports)) => {
                    print_reports(out, steps, &reports)?;
                    steps += reports.len();
                    writeln!(out, "quiescent after {} micro step(s)", reports.len())?;
                    state = next;
                }
                Err(h) => {
                    print_reports(out, steps, &h.reports)?;
                    steps += h.reports.len();
                    writeln!(out, "halted: {}", h.error)?;
                    state = h.state;
                }
            },
            "show" => show(out, &state, arg)?,
            other => writeln!(out, "unknown command `{other}`; try event, micro, quiesce, show or quit")?,
        }
        out.flush()?;
    }
}

fn apply_event(state: &mut ExecutionState, ev: &Event) {
    for (n, v) in ev {
        state.external.insert(n.clone(), v.clone());
    }
}

/// Run one oracle suite and print its report.
pub fn cmd_check(suite: Suite, seed: u64, cases: usize, out: &mut dyn Write) -> u8 {
    let report = run_suite(suite, seed, cases);
    let _ = write!(out, "{report}");
    if report.ok() {
        EXIT_OK
    } else {
        EXIT_ERROR
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Extension {
    #[default]
    Sync,
    Async,
    Parallel,
    Serialize,
}

/// Successors of `input` after `steps` steps of the chosen extension of the
/// system's relation, with uniform priorities for the strategy.
pub fn rewrite(
    system: &str,
    input: &TermSet,
    ext: Extension,
    steps: usize,
    limit: usize,
) -> Result<BTreeSet<TermSet>, RewriteFailure> {
    let sys = parse_rules(system).map_err(|e| RewriteFailure::Input(e.to_string()))?;
    let rel = sys.relation().with_limit(limit);
    let s = max_redexes(&rel, Uniform);
    let result = match ext {
        Extension::Sync => nfold(sync_ext(&rel, &s), steps).step(input),
        Extension::Async => nfold(async_ext(&rel), steps).step(input),
        Extension::Parallel => nfold(parallel_ext(&rel), steps).step(input),
        Extension::Serialize => {
            let mut cur = BTreeSet::from([input.clone()]);
            for _ in 0..steps {
                let mut next = BTreeSet::new();
                for a in &cur {
                    next.extend(serialize(&rel, &s, a)?);
                }
                cur = next;
            }
            Ok(cur)
        }
    };
    Ok(result?)
}

#[derive(Debug, thiserror::Error)]
pub enum RewriteFailure {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    SetRel(#[from] SetRelError),
}

pub fn cmd_rewrite(
    system: &Path,
    input: &str,
    ext: Extension,
    steps: usize,
    limit: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> u8 {
    let parsed = read(system).and_then(|s| {
        let a = parse_termset(input).map_err(|e| format!("input set: {e}"))?;
        Ok((s, a))
    });
    let (text, a) = match parsed {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    match rewrite(&text, &a, ext, steps, limit) {
        Ok(results) => {
            if results.is_empty() {
                let _ = writeln!(err, "no successors");
            }
            for r in results {
                let _ = writeln!(out, "{r}");
            }
            EXIT_OK
        }
        Err(RewriteFailure::SetRel(e @ SetRelError::TooLarge { .. })) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_TOO_LARGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
