//! Line-oriented trace records and state dumps.

use std::fmt::Write;

use syncrel_core::plexil::exec::{MacroRecord, MicroReport};

use crate::events::format_event;

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// One line per micro step.
pub fn micro_line(step: usize, r: &MicroReport) -> String {
    let mut line = format!(
        "step {step} fired [{}] updates [{}]",
        join(r.fired.iter().map(|(n, l)| format!("{n}:{l}"))),
        join(&r.updates)
    );
    if !r.races.is_empty() {
        let _ = write!(line, " races [{}]", r.races.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "));
    }
    if !r.issued.is_empty() {
        let _ = write!(line, " issued [{}]", join(r.issued.iter().map(|(n, c)| format!("{n}:{c}"))));
    }
    line
}

/// How much of a run to print.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Verbosity {
    /// One line per macro step.
    Macro,
    /// Every micro step.
    #[default]
    Micro,
}

/// Render macro records; micro steps are numbered from 1 across the run.
pub fn render(records: &[MacroRecord], verbosity: Verbosity) -> String {
    let mut out = String::new();
    let mut step = 0;
    for (i, rec) in records.iter().enumerate() {
        let _ = writeln!(
            out,
            "macro {} event [{}] micro-steps {}",
            i + 1,
            format_event(&rec.event),
            rec.reports.len()
        );
        for r in &rec.reports {
            step += 1;
            if verbosity >= Verbosity::Micro {
                let _ = writeln!(out, "  {}", micro_line(step, r));
            }
        }
    }
    out
}
