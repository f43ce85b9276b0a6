//! Event scripts: one macro step per line, `name=value` pairs separated by
//! commas. A blank line is an empty event and `#` starts a comment line.

use std::fmt::Write;

use syncrel_core::plexil::exec::Event;
use syncrel_core::plexil::value::parse_value;

#[derive(Debug, thiserror::Error)]
#[error("event script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventScript {
    pub events: Vec<Event>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.split('.').all(|part| {
            let mut cs = part.chars();
            cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// Parse one event: `name=value, name=value`. The empty string is the empty
/// event.
pub fn parse_event(text: &str) -> Result<Event, String> {
    let mut event = Event::new();
    for pair in text.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, found `{pair}`"))?;
        let name = name.trim();
        if !valid_name(name) {
            return Err(format!("invalid name `{name}`"));
        }
        let v = parse_value(value).ok_or_else(|| format!("invalid value `{}`", value.trim()))?;
        event.push((name.to_string(), v));
    }
    Ok(event)
}

pub fn parse_events(text: &str) -> Result<EventScript, ScriptError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        events.push(parse_event(line).map_err(|message| ScriptError { line: i + 1, message })?);
    }
    Ok(EventScript { events })
}

pub fn format_event(e: &Event) -> String {
    let mut out = String::new();
    for (i, (n, v)) in e.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{n}={v}");
    }
    out
}
