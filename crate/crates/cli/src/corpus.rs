//! The plan corpus shipped with the binary.

use syncrel_core::plexil::exec::Event;
use syncrel_core::plexil::{compile, parse_plan, ExecutionState};

use crate::events::parse_events;

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub plan: &'static str,
    pub events: &'static str,
}

pub const CORPUS: [Entry; 5] = [
    Entry {
        name: "safedrive",
        plan: include_str!("../plans/safedrive.plx"),
        events: include_str!("../plans/safedrive.events"),
    },
    Entry {
        name: "race",
        plan: include_str!("../plans/race.plx"),
        events: include_str!("../plans/race.events"),
    },
    Entry {
        name: "tie",
        plan: include_str!("../plans/tie.plx"),
        events: include_str!("../plans/tie.events"),
    },
    Entry {
        name: "guarded",
        plan: include_str!("../plans/guarded.plx"),
        events: include_str!("../plans/guarded.events"),
    },
    Entry {
        name: "cyclic",
        plan: include_str!("../plans/cyclic.plx"),
        events: include_str!("../plans/cyclic.events"),
    },
];

impl Entry {
    pub fn load(&self) -> anyhow::Result<(ExecutionState, Vec<Event>)> {
        let state = compile(&parse_plan(self.plan)?)?;
        Ok((state, parse_events(self.events)?.events))
    }
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    CORPUS.iter().find(|e| e.name == name)
}
