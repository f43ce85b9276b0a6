mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use syncrel_core::plexil::bridge::micro_as_setrel;
use syncrel_core::plexil::checks::{
    check_atomicity, check_group_priority, check_race_rule, check_synchrony, scan_orders,
};
use syncrel_core::plexil::exec::{
    apply_updates, execute, execute_with, macro_step, micro, micro_with_order, quiescence, unprime, Event,
    ExecError, MicroReport,
};
use syncrel_core::plexil::rules::{atomic_try, RuleTable};
use syncrel_core::plexil::{ExecutionState, NodeType, Outcome, Status, UpdateMsg, Value};
use syncrel_core::setrel::DEFAULT_MAX_SET_SIZE;

const BOUND: usize = 10_000;

fn fig3_state(root_inv: Value, a_inv: Value, end: Value, post: Value) -> ExecutionState {
    let mut s = state(FIG3);
    set_status(&mut s, "Root", Status::Executing);
    set_status(&mut s, "A.Root", Status::Executing);
    set_env(&mut s, "RootInv", root_inv);
    set_env(&mut s, "AInv", a_inv);
    set_env(&mut s, "AEnd", end);
    set_env(&mut s, "APost", post);
    s
}

fn fire(s: &ExecutionState) -> (String, BTreeSet<UpdateMsg>) {
    let rules = RuleTable::standard();
    let group = rules.group(NodeType::Assignment, Status::Executing).unwrap();
    let t = atomic_try(group, s, &qn("A.Root")).unwrap().unwrap();
    (t.label, t.updates.into_iter().collect())
}

fn a() -> syncrel_core::plexil::QualifiedName {
    qn("A.Root")
}

fn x() -> syncrel_core::plexil::QualifiedName {
    qn("x.Root")
}

const T: Value = Value::Bool(true);
const F: Value = Value::Bool(false);

#[test]
fn r1_ancestor_invariant_false() {
    let (label, ups) = fire(&fig3_state(F, T, F, T));
    assert_eq!(label, "r1");
    assert_eq!(
        ups,
        BTreeSet::from([
            UpdateMsg::Status(a(), Status::Finished),
            UpdateMsg::Outcome(a(), Outcome::Failure),
            UpdateMsg::Variable(x(), Value::Unknown),
        ])
    );
}

#[test]
fn r2_own_invariant_false() {
    let (label, ups) = fire(&fig3_state(T, F, F, T));
    assert_eq!(label, "r2");
    assert_eq!(
        ups,
        BTreeSet::from([
            UpdateMsg::Status(a(), Status::IterationEnded),
            UpdateMsg::Outcome(a(), Outcome::Failure),
            UpdateMsg::Variable(x(), Value::Unknown),
        ])
    );
}

#[test]
fn r3_end_and_post_true() {
    let (label, ups) = fire(&fig3_state(T, T, T, T));
    assert_eq!(label, "r3");
    assert_eq!(
        ups,
        BTreeSet::from([
            UpdateMsg::Status(a(), Status::IterationEnded),
            UpdateMsg::Outcome(a(), Outcome::Success),
            UpdateMsg::Variable(x(), Value::Int(7)),
        ])
    );
}

#[test]
fn r4_end_true_post_not_true() {
    for post in [F, Value::Unknown] {
        let (label, ups) = fire(&fig3_state(T, T, T, post));
        assert_eq!(label, "r4");
        assert_eq!(
            ups,
            BTreeSet::from([
                UpdateMsg::Status(a(), Status::IterationEnded),
                UpdateMsg::Outcome(a(), Outcome::Failure),
            ])
        );
    }
}

#[test]
fn r1_shadows_r2() {
    let (label, ups) = fire(&fig3_state(F, F, T, T));
    assert_eq!(label, "r1");
    assert_eq!(
        ups,
        BTreeSet::from([
            UpdateMsg::Status(a(), Status::Finished),
            UpdateMsg::Outcome(a(), Outcome::Failure),
            UpdateMsg::Variable(x(), Value::Unknown),
        ])
    );
}

#[test]
fn no_rule_when_nothing_holds() {
    let rules = RuleTable::standard();
    let group = rules.group(NodeType::Assignment, Status::Executing).unwrap();
    let s = fig3_state(T, T, F, T);
    assert_eq!(atomic_try(group, &s, &a()).unwrap(), None);
    // Unknown invariants are not false
    let s = fig3_state(Value::Unknown, Value::Unknown, Value::Unknown, T);
    assert_eq!(atomic_try(group, &s, &a()).unwrap(), None);
}

fn racing(p1: u64, p2: u64) -> ExecutionState {
    let mut s = state(&race(p1, p2));
    for n in ["Root", "A.Root", "B.Root"] {
        set_status(&mut s, n, Status::Executing);
    }
    s
}

#[test]
fn higher_priority_wins_a_race() {
    let (next, report) = micro(&racing(2, 1)).unwrap();
    assert_eq!(next.actval_of("x.Root"), Some(&Value::Int(1)));
    for n in ["A.Root", "B.Root"] {
        assert_eq!(next.status_of(n), Some(Status::IterationEnded));
        assert_eq!(next.node(&qn(n)).unwrap().outcome, Outcome::Success);
    }
    assert_eq!(report.races.len(), 1);
    assert_eq!(report.races[0].winner, Some(qn("A.Root")));

    let (next, _) = micro(&racing(1, 2)).unwrap();
    assert_eq!(next.actval_of("x.Root"), Some(&Value::Int(2)));
}

#[test]
fn tied_race_writes_nothing() {
    for p in [0, 1, 2] {
        let (next, report) = micro(&racing(p, p)).unwrap();
        assert_eq!(next.actval_of("x.Root"), Some(&Value::Int(0)));
        for n in ["A.Root", "B.Root"] {
            assert_eq!(next.status_of(n), Some(Status::IterationEnded));
            assert_eq!(next.node(&qn(n)).unwrap().outcome, Outcome::Success);
        }
        assert_eq!(report.races[0].winner, None);
        assert!(report.updates.iter().all(|u| !matches!(u, UpdateMsg::Variable(..))));
    }
}

#[test]
fn apply_updates_and_unprime() {
    let mut s = state(FIG3);
    let before = s.clone();
    apply_updates(&mut s).unwrap();
    assert_eq!(s, before);

    s.pending = vec![
        UpdateMsg::Status(a(), Status::Waiting),
        UpdateMsg::Variable(x(), Value::Unknown),
    ];
    apply_updates(&mut s).unwrap();
    assert!(s.pending.is_empty());
    assert_eq!(s.status_of("A.Root"), Some(Status::Waiting));
    assert_eq!(s.actval_of("x.Root"), Some(&Value::Unknown));
    assert_eq!(s.variable(&x()).unwrap().initval, Value::Int(0));

    s.pending = vec![UpdateMsg::Status(qn("Nope"), Status::Waiting)];
    assert!(matches!(apply_updates(&mut s), Err(ExecError::UnknownTarget(_))));

    let mut s = state(FIG3);
    unprime(&mut s);
    assert!(s.primed.is_empty());
    s.primed.insert(a());
    unprime(&mut s);
    assert!(s.primed.is_empty());
    s.primed = s.plan.node_ids().iter().cloned().collect();
    let nodes = s.nodes.clone();
    unprime(&mut s);
    assert!(s.primed.is_empty());
    assert_eq!(s.nodes, nodes);
}

#[test]
fn first_micro_step_activates_only_the_root() {
    let s = state(SAFEDRIVE);
    let (next, report) = micro(&s).unwrap();
    assert_eq!(report.fired, vec![(qn("SafeDrive"), "inactive-activate".to_string())]);
    assert_eq!(next.status_of("SafeDrive"), Some(Status::Waiting));
    assert!(next
        .nodes
        .iter()
        .filter(|(id, _)| id.to_string() != "SafeDrive")
        .all(|(_, n)| n.status == Status::Inactive));
    assert!(next.is_settled());
}

#[test]
fn quiescence_of_a_normal_state_takes_no_steps() {
    let s = state(SAFEDRIVE);
    let (done, reports) = quiescence(&s, BOUND).unwrap();
    let (again, more) = quiescence(&done, BOUND).unwrap();
    assert!(!reports.is_empty());
    assert!(more.is_empty());
    assert_eq!(again, done);
    let (_, r) = micro(&done).unwrap();
    assert_eq!(r, MicroReport::default());
}

#[test]
fn first_event_runs_up_to_the_first_command() {
    let s = state(SAFEDRIVE);
    let (next, reports) = macro_step(&s, &[("WheelStuck".into(), F)], BOUND).unwrap();
    assert_eq!(next.status_of("SafeDrive"), Some(Status::Executing));
    assert_eq!(next.status_of("Loop.SafeDrive"), Some(Status::Executing));
    assert_eq!(next.status_of("OneMeter.Loop.SafeDrive"), Some(Status::Executing));
    assert_eq!(next.status_of("TakePic.Loop.SafeDrive"), Some(Status::Waiting));
    assert_eq!(next.status_of("Counter.Loop.SafeDrive"), Some(Status::Waiting));
    let issued: Vec<_> = reports.iter().flat_map(|r| r.issued.iter().map(|(_, c)| c.clone())).collect();
    assert_eq!(issued, ["Drive(1)"]);
}

#[test]
fn safedrive_takes_ten_pictures_and_finishes() {
    let trace = execute(&state(SAFEDRIVE), &safedrive_events(), BOUND).unwrap();
    let s = &trace.final_state;
    assert_eq!(s.actval_of("pictures.SafeDrive"), Some(&Value::Int(10)));
    assert!(s.nodes.values().all(|n| n.status == Status::Finished));
    assert_eq!(s.node(&qn("SafeDrive")).unwrap().outcome, Outcome::Success);
    assert_eq!(trace.records.len(), 22);

    let issued: Vec<String> = trace
        .records
        .iter()
        .flat_map(|r| &r.reports)
        .flat_map(|r| r.issued.iter().map(|(_, c)| c.clone()))
        .collect();
    let drives = issued.iter().filter(|c| *c == "Drive(1)").count();
    let pics = issued.iter().filter(|c| *c == "TakePicture()").count();
    assert_eq!((drives, pics), (10, 10));
}

#[test]
fn counter_increments_once_per_round() {
    let mut s = state(SAFEDRIVE);
    for (i, e) in safedrive_events().iter().enumerate() {
        s = macro_step(&s, e, BOUND).unwrap().0;
        let expected = (i as i64 / 2).min(10);
        assert_eq!(s.actval_of("pictures.SafeDrive"), Some(&Value::Int(expected)), "after event {i}");
    }
}

#[test]
fn stuck_wheel_mid_run_finishes_every_node() {
    let events = safedrive_events();
    let mut s = execute(&state(SAFEDRIVE), &events[..5], BOUND).unwrap().final_state;
    assert_eq!(s.actval_of("pictures.SafeDrive"), Some(&Value::Int(2)));
    s = macro_step(&s, &[("WheelStuck".into(), T)], BOUND).unwrap().0;
    assert!(s.nodes.values().all(|n| n.status == Status::Finished), "{}", s.dump());
    assert_eq!(s.actval_of("pictures.SafeDrive"), Some(&Value::Int(2)));
}

#[test]
fn empty_event_on_a_quiescent_state_changes_nothing() {
    let s = execute(&state(SAFEDRIVE), &safedrive_events()[..3], BOUND).unwrap().final_state;
    let (next, reports) = macro_step(&s, &[], BOUND).unwrap();
    assert!(reports.is_empty());
    assert_eq!(next, s);
}

#[test]
fn event_rebinding_keeps_one_binding() {
    let s = state("Empty E { Start: false; }");
    let (s, _) = macro_step(&s, &[("n".into(), Value::Int(1))], BOUND).unwrap();
    let (s, _) = macro_step(&s, &[("n".into(), Value::Int(2)), ("m".into(), T)], BOUND).unwrap();
    assert_eq!(s.external.len(), 2);
    assert_eq!(s.external["n"], Value::Int(2));
}

#[test]
fn execute_without_events_is_the_identity() {
    let s = state(SAFEDRIVE);
    let trace = execute(&s, &[], BOUND).unwrap();
    assert!(trace.records.is_empty());
    assert_eq!(trace.final_state, s);
}

#[test]
fn single_empty_node_finishes_in_one_macro_step() {
    let trace = execute(&state("Empty E {}"), &[vec![]], BOUND).unwrap();
    let s = &trace.final_state;
    assert_eq!(s.status_of("E"), Some(Status::Finished));
    assert_eq!(s.node(&qn("E")).unwrap().outcome, Outcome::Success);
}

#[test]
fn cyclic_plan_is_reported_as_a_spurious_loop() {
    let err = execute(&state(CYCLIC), &[vec![]], BOUND).unwrap_err();
    let ExecError::SpuriousLoop { first, repeat } = err.error else {
        panic!("expected a spurious loop, got {}", err.error);
    };
    assert!(first < repeat && repeat < 10, "{first} {repeat}");
}

#[test]
fn bound_exhaustion() {
    let s = state(SAFEDRIVE);
    let halt = quiescence(&s, 2).unwrap_err();
    assert_eq!(halt.error, ExecError::BoundExhausted { bound: 2 });
    assert_eq!(halt.reports.len(), 2);
}

fn corpus() -> Vec<(&'static str, ExecutionState, Vec<Event>)> {
    let r21 = state(&race(2, 1));
    let r11 = state(&race(1, 1));
    vec![
        ("safedrive", state(SAFEDRIVE), safedrive_events()),
        ("race", r21, vec![vec![]]),
        ("tie", r11, vec![vec![]]),
        ("fig3", state(FIG3), fig3_events()),
        ("cyclic", state(CYCLIC), vec![vec![]]),
        ("empty", state("Empty E {}"), vec![vec![]]),
    ]
}

fn fig3_events() -> Vec<Event> {
    let ev = |pairs: &[(&str, Value)]| pairs.iter().map(|(n, v)| (n.to_string(), v.clone())).collect();
    vec![
        ev(&[("RootInv", T), ("AInv", T), ("AEnd", F), ("APost", T)]),
        ev(&[("AEnd", T)]),
        ev(&[("RootInv", F)]),
    ]
}

/// Every micro step evaluated while running the corpus.
fn corpus_steps() -> Vec<(String, ExecutionState, MicroReport, ExecutionState)> {
    let mut out = Vec::new();
    for (name, s, events) in corpus() {
        let _ = execute_with(&s, &events, BOUND, None, &mut |pre, r, post| {
            out.push((name.to_string(), pre.clone(), r.clone(), post.clone()))
        });
    }
    out
}

#[test]
fn scan_order_never_changes_a_micro_step() {
    for (name, pre, _, _) in corpus_steps() {
        let orders = scan_orders(&pre);
        assert!(orders.len() >= 3);
        check_synchrony(&pre, &orders).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn micro_is_deterministic_on_the_corpus() {
    for (name, pre, report, post) in corpus_steps() {
        let (again, r) = micro(&pre).unwrap();
        assert_eq!((&again, &r), (&post, &report), "{name}");
    }
}

#[test]
fn fired_rules_respect_group_priority() {
    for (name, pre, report, _) in corpus_steps() {
        check_group_priority(&pre, &report).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn races_resolve_by_strict_priority() {
    for (name, pre, report, _) in corpus_steps() {
        check_race_rule(&pre, &report).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn variable_writes_are_atomic_with_status_changes() {
    let steps = corpus_steps();
    assert!(steps.iter().any(|(_, _, r, _)| r.fired.iter().any(|(_, l)| l == "r3")));
    for (name, pre, report, post) in steps {
        check_atomicity(&pre, &report, &post).unwrap_or_else(|e| panic!("{name}: {e}"));
        for (n, label) in &report.fired {
            if label == "r3" {
                assert_eq!(pre.status(n), Some(Status::Executing));
                assert_eq!(post.status(n), Some(Status::IterationEnded));
            }
        }
    }
}

#[test]
fn quiescence_returns_only_normal_forms() {
    for (_, s, events) in corpus() {
        let mut cur = s;
        for e in &events {
            match macro_step(&cur, e, BOUND) {
                Ok((next, _)) => {
                    assert!(micro(&next).unwrap().1.is_empty());
                    cur = next;
                }
                Err(h) => {
                    assert!(matches!(h.error, ExecError::SpuriousLoop { .. } | ExecError::BoundExhausted { .. }));
                    break;
                }
            }
        }
    }
}

#[test]
fn micro_matches_the_synchronous_set_relation() {
    for (name, pre, _, _) in corpus_steps() {
        let check = micro_as_setrel(&pre, DEFAULT_MAX_SET_SIZE).unwrap();
        assert!(check.agrees(), "{name}: {}", syncrel_core::plexil::bridge::describe(&check));
    }
}

#[test]
fn quiescent_state_has_no_synchronous_successor() {
    let s = quiescence(&state(SAFEDRIVE), BOUND).unwrap().0;
    let check = micro_as_setrel(&s, DEFAULT_MAX_SET_SIZE).unwrap();
    assert!(check.oracle.is_empty() && check.micro.is_empty());
}

#[test]
fn race_states_agree_with_the_oracle() {
    for (p1, p2) in [(2, 1), (1, 2), (1, 1), (0, 0)] {
        let check = micro_as_setrel(&racing(p1, p2), DEFAULT_MAX_SET_SIZE).unwrap();
        assert_eq!(check.oracle.len(), 1);
        assert!(check.agrees(), "{p1} {p2}");
    }
}

#[test]
fn bridge_refuses_states_above_the_cap() {
    let s = state(SAFEDRIVE);
    assert!(micro_as_setrel(&s, 3).is_err());
}

// A fixed family of flat plans: several assignment nodes over shared
// variables with random priorities and start conditions.
fn arb_flat_plan() -> impl Strategy<Value = String> {
    let node = (0usize..2, 0u64..3, 0i64..4, any::<bool>());
    proptest::collection::vec(node, 1..5).prop_map(|nodes| {
        let mut text = String::from("List R {\n  int v0 = 0;\n  int v1 = 0;\n");
        for (i, (var, prio, val, gate)) in nodes.iter().enumerate() {
            let start = if *gate { "v0 < 3" } else { "true" };
            text.push_str(&format!(
                "  Assignment N{i} {{ Start: {start}; Assignment: v{var} := v{var} + {val}; Priority: {prio}; }}\n"
            ));
        }
        text.push('}');
        text
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold_on_random_flat_plans(text in arb_flat_plan()) {
        let s = state(&text);
        let mut steps = Vec::new();
        let _ = execute_with(&s, &[vec![], vec![]], BOUND, None, &mut |pre, r, post| {
            steps.push((pre.clone(), r.clone(), post.clone()))
        });
        for (pre, report, post) in &steps {
            check_synchrony(pre, &scan_orders(pre)).map_err(TestCaseError::fail)?;
            check_group_priority(pre, report).map_err(TestCaseError::fail)?;
            check_race_rule(pre, report).map_err(TestCaseError::fail)?;
            check_atomicity(pre, report, post).map_err(TestCaseError::fail)?;
            let check = micro_as_setrel(pre, DEFAULT_MAX_SET_SIZE).unwrap();
            prop_assert!(check.agrees(), "{}", syncrel_core::plexil::bridge::describe(&check));
        }
    }

    #[test]
    fn random_scan_orders_agree(text in arb_flat_plan(), seed in any::<u64>()) {
        let s = state(&text);
        let mut cur = s;
        for _ in 0..4 {
            let mut order = cur.plan.node_ids().to_vec();
            // Fisher-Yates with a tiny LCG
            let mut r = seed;
            for i in (1..order.len()).rev() {
                r = r.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (r >> 33) as usize % (i + 1));
            }
            let a = micro(&cur).unwrap();
            let b = micro_with_order(&cur, &order).unwrap();
            prop_assert_eq!(&a, &b);
            cur = a.0;
        }
    }
}
