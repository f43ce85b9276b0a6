//! Oracle suites run by `check`.

use std::fmt;

use syncrel_core::plexil::bridge::{describe, micro_as_setrel};
use syncrel_core::plexil::checks::{
    check_atomicity, check_group_priority, check_race_rule, check_synchrony, scan_orders,
};
use syncrel_core::plexil::exec::{execute_with, ExecError};
use syncrel_core::setrel::oracle::{check_completeness, check_soundness, determinism_propagation, Violation};
use syncrel_core::setrel::{all_subsets, is_deterministic, max_redexes, SetRelError, DEFAULT_MAX_SET_SIZE};
use syncrel_core::RewriteRelation;

use crate::corpus::CORPUS;
use crate::gen::{Case, Generator};

pub const PLEXIL_BOUND: usize = 10_000;
/// Step bound for normalized reduction in the propagation suite.
pub const NORMALIZE_BOUND: usize = 16;
/// Largest n for the n-fold compositions in the propagation suite.
pub const MAX_FOLD: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Soundness,
    Completeness,
    DeterminismPropagation,
    PlexilDifferential,
    PlexilInvariants,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    /// Runs reported but not counted, e.g. completeness on
    /// nondeterministic systems.
    pub informational: Option<String>,
    pub failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.failure.is_none() && self.passed == self.checked
    }

    fn record(&mut self, result: Result<(), String>) {
        self.checked += 1;
        match result {
            Ok(()) => self.passed += 1,
            Err(e) => {
                if self.failure.is_none() {
                    self.failure = Some(e);
                }
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}/{} passed{}",
            self.name,
            self.passed,
            self.checked,
            if self.ok() { "" } else { " FAILED" }
        )?;
        if let Some(i) = &self.informational {
            writeln!(f, "  {i}")?;
        }
        if let Some(e) = &self.failure {
            writeln!(f, "first counterexample:")?;
            for line in e.lines() {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

fn counterexample(case: &Case, v: &Violation) -> String {
    format!(
        "rule system:\n{}priority: {}\ninput: {}\n{}",
        indent(&case.system.to_string()),
        case.weights,
        v.input,
        v.detail
    )
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

type Check = fn(&RewriteRelation, &Case, &syncrel_core::TermSet) -> Result<Option<Violation>, SetRelError>;

fn over_universe(case: &Case, check: Check) -> Result<(), String> {
    let rel = case.system.relation();
    let subsets = all_subsets(&case.universe, DEFAULT_MAX_SET_SIZE).map_err(|e| e.to_string())?;
    for a in subsets {
        match check(&rel, case, &a) {
            Ok(None) => {}
            Ok(Some(v)) => return Err(counterexample(case, &v)),
            Err(e) => return Err(format!("{e}")),
        }
    }
    Ok(())
}

fn soundness_on(r: &RewriteRelation, c: &Case, a: &syncrel_core::TermSet) -> Result<Option<Violation>, SetRelError> {
    check_soundness(r, &max_redexes(r, c.weights.clone()), a)
}

fn completeness_on(
    r: &RewriteRelation,
    c: &Case,
    a: &syncrel_core::TermSet,
) -> Result<Option<Violation>, SetRelError> {
    check_completeness(r, &max_redexes(r, c.weights.clone()), a)
}

/// Serialization results are synchronous successors, on every subset of the
/// universe of each of `cases` random systems.
pub fn soundness(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("soundness");
    let mut g = Generator::new(seed);
    for _ in 0..cases {
        report.record(over_universe(&g.next_case(), soundness_on));
    }
    report
}

/// Serialization gives exactly the synchronous successors. Counted only for
/// systems whose relation is deterministic on the universe; the others are
/// reported for information.
pub fn completeness(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("completeness (deterministic systems)");
    let mut g = Generator::new(seed);
    let (mut nondet, mut nondet_agree) = (0, 0);
    for _ in 0..cases {
        let case = g.next_case();
        let det = match is_deterministic(&case.system.relation(), &case.universe) {
            Ok(d) => d,
            Err(e) => {
                report.record(Err(e.to_string()));
                continue;
            }
        };
        let result = over_universe(&case, completeness_on);
        if det {
            report.record(result);
        } else {
            nondet += 1;
            nondet_agree += usize::from(result.is_ok());
        }
    }
    report.informational = Some(format!(
        "nondeterministic systems (informational): {nondet_agree}/{nondet} agreed"
    ));
    report
}

/// For deterministic systems, n-fold composition (n ≤ 3), normalized
/// reduction and the synchronous extension under maximal redexes have at
/// most one successor per subset.
pub fn determinism_propagation_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("determinism-propagation");
    let mut g = Generator::new(seed);
    let mut attempts = 0;
    while report.checked < cases && attempts < cases.saturating_mul(100).max(100) {
        attempts += 1;
        let case = g.next_case();
        let rel = case.system.relation();
        match is_deterministic(&rel, &case.universe) {
            Ok(true) => {}
            Ok(false) => continue,
            Err(e) => {
                report.record(Err(e.to_string()));
                continue;
            }
        }
        let s = max_redexes(&rel, case.weights.clone());
        let result = match determinism_propagation(&rel, &s, &case.universe, MAX_FOLD, NORMALIZE_BOUND) {
            Ok(f) if f.is_empty() => Ok(()),
            Ok(f) => Err(format!(
                "rule system:\n{}priority: {}\nnondeterministic: {}",
                indent(&case.system.to_string()),
                case.weights,
                f.iter().map(|(n, a)| format!("{n} on {a}")).collect::<Vec<_>>().join(", ")
            )),
            Err(e) => Err(e.to_string()),
        };
        report.record(result);
    }
    if report.checked < cases {
        report.failure.get_or_insert(format!(
            "only {} deterministic systems in {attempts} draws",
            report.checked
        ));
    }
    report
}

type StepCheck<'a> = dyn FnMut(
        &syncrel_core::plexil::ExecutionState,
        &syncrel_core::plexil::MicroReport,
        &syncrel_core::plexil::ExecutionState,
    ) -> Result<(), String>
    + 'a;

/// Run every corpus plan and apply `check` to each micro step evaluated.
/// Runs may end in a spurious loop; any other halt is a failure.
fn over_corpus(report: &mut SuiteReport, check: &mut StepCheck<'_>) {
    for entry in &CORPUS {
        let (state, events) = match entry.load() {
            Ok(x) => x,
            Err(e) => {
                report.record(Err(format!("{}: {e}", entry.name)));
                continue;
            }
        };
        let mut observe = |pre: &_, r: &_, post: &_| {
            report.record(check(pre, r, post).map_err(|e| format!("{}: {e}", entry.name)));
        };
        if let Err(h) = execute_with(&state, &events, PLEXIL_BOUND, None, &mut observe) {
            if !matches!(h.error, ExecError::SpuriousLoop { .. }) {
                report.record(Err(format!("{}: {}", entry.name, h.error)));
            }
        }
    }
}

/// Every micro step of the corpus equals one synchronous step of the
/// encoded atomic relation under maximal redexes.
pub fn plexil_differential() -> SuiteReport {
    let mut report = SuiteReport::new("plexil-differential");
    over_corpus(&mut report, &mut |pre, _, _| {
        let check = micro_as_setrel(pre, DEFAULT_MAX_SET_SIZE).map_err(|e| e.to_string())?;
        if check.agrees() {
            Ok(())
        } else {
            Err(describe(&check))
        }
    });
    report
}

/// Synchrony, group priority, race resolution and atomicity on every micro
/// step of the corpus.
pub fn plexil_invariants() -> SuiteReport {
    let mut report = SuiteReport::new("plexil-invariants");
    over_corpus(&mut report, &mut |pre, r, post| {
        check_synchrony(pre, &scan_orders(pre))?;
        check_group_priority(pre, r)?;
        check_race_rule(pre, r)?;
        check_atomicity(pre, r, post)
    });
    report
}

pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    match suite {
        Suite::Soundness => soundness(seed, cases),
        Suite::Completeness => completeness(seed, cases),
        Suite::DeterminismPropagation => determinism_propagation_suite(seed, cases),
        Suite::PlexilDifferential => plexil_differential(),
        Suite::PlexilInvariants => plexil_invariants(),
    }
}
