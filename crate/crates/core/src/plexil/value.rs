//! Values with an Unknown element, and the enumerations of the node model.

use alloc::string::String;
use core::fmt;

/// A runtime value. `Unknown` is distinct from every concrete value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
    Unknown,
}

impl Value {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Value::Unknown)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Value::Bool(false))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
            Value::Unknown => "unknown",
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Unknown => f.write_str("unknown"),
        }
    }
}

/// Parse the textual form used in event scripts and dumps: an integer,
/// `true`, `false`, `unknown` or a double-quoted string.
pub fn parse_value(text: &str) -> Option<Value> {
    let t = text.trim();
    match t {
        "true" => return Some(Value::Bool(true)),
        "false" => return Some(Value::Bool(false)),
        "unknown" => return Some(Value::Unknown),
        _ => {}
    }
    if let Some(inner) = t.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        if !inner.contains('"') {
            return Some(Value::Str(inner.into()));
        }
        return None;
    }
    t.parse::<i64>().ok().map(Value::Int)
}

/// Kleene conjunction on booleans and Unknown. `None` on a non-boolean.
pub fn kleene_and(a: &Value, b: &Value) -> Option<Value> {
    match (a, b) {
        (Value::Bool(false), Value::Bool(_) | Value::Unknown)
        | (Value::Bool(_) | Value::Unknown, Value::Bool(false)) => Some(Value::Bool(false)),
        (Value::Bool(true), Value::Bool(true)) => Some(Value::Bool(true)),
        (Value::Bool(_) | Value::Unknown, Value::Bool(_) | Value::Unknown) => Some(Value::Unknown),
        _ => None,
    }
}

pub fn kleene_or(a: &Value, b: &Value) -> Option<Value> {
    match (a, b) {
        (Value::Bool(true), Value::Bool(_) | Value::Unknown)
        | (Value::Bool(_) | Value::Unknown, Value::Bool(true)) => Some(Value::Bool(true)),
        (Value::Bool(false), Value::Bool(false)) => Some(Value::Bool(false)),
        (Value::Bool(_) | Value::Unknown, Value::Bool(_) | Value::Unknown) => Some(Value::Unknown),
        _ => None,
    }
}

pub fn kleene_not(a: &Value) -> Option<Value> {
    match a {
        Value::Bool(b) => Some(Value::Bool(!b)),
        Value::Unknown => Some(Value::Unknown),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeType {
    List,
    Command,
    Assignment,
    Empty,
}

impl NodeType {
    pub const ALL: [NodeType; 4] = [
        NodeType::List,
        NodeType::Command,
        NodeType::Assignment,
        NodeType::Empty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeType::List => "List",
            NodeType::Command => "Command",
            NodeType::Assignment => "Assignment",
            NodeType::Empty => "Empty",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Inactive,
    Waiting,
    Executing,
    Finishing,
    Failing,
    Finished,
    IterationEnded,
}

impl Status {
    pub const ALL: [Status; 7] = [
        Status::Inactive,
        Status::Waiting,
        Status::Executing,
        Status::Finishing,
        Status::Failing,
        Status::Finished,
        Status::IterationEnded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Status::Inactive => "Inactive",
            Status::Waiting => "Waiting",
            Status::Executing => "Executing",
            Status::Finishing => "Finishing",
            Status::Failing => "Failing",
            Status::Finished => "Finished",
            Status::IterationEnded => "IterationEnded",
        }
    }

    /// The constant a plan uses to compare against, e.g. `FINISHED`.
    pub fn keyword(self) -> &'static str {
        match self {
            Status::Inactive => "INACTIVE",
            Status::Waiting => "WAITING",
            Status::Executing => "EXECUTING",
            Status::Finishing => "FINISHING",
            Status::Failing => "FAILING",
            Status::Finished => "FINISHED",
            Status::IterationEnded => "ITERATION_ENDED",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.keyword() == s)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    None,
    Success,
    Failure,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::None, Outcome::Success, Outcome::Failure];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::None => "None",
            Outcome::Success => "Success",
            Outcome::Failure => "Failure",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Outcome::None => "NONE",
            Outcome::Success => "SUCCESS",
            Outcome::Failure => "FAILURE",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.keyword() == s)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALS: [Value; 3] = [Value::Bool(true), Value::Bool(false), Value::Unknown];

    // Kleene tables with Unknown read as the interval {false, true}: the
    // result is known iff it is the same for every refinement.
    fn refine(v: &Value) -> &'static [bool] {
        match v {
            Value::Bool(true) => &[true],
            Value::Bool(false) => &[false],
            _ => &[false, true],
        }
    }

    fn lift(outs: impl Iterator<Item = bool>) -> Value {
        let v: alloc::vec::Vec<bool> = outs.collect();
        if v.iter().all(|b| *b) {
            Value::Bool(true)
        } else if v.iter().all(|b| !*b) {
            Value::Bool(false)
        } else {
            Value::Unknown
        }
    }

    #[test]
    fn kleene_tables_match_refinement() {
        for a in &VALS {
            for b in &VALS {
                let and = lift(refine(a).iter().flat_map(|x| refine(b).iter().map(move |y| *x && *y)));
                let or = lift(refine(a).iter().flat_map(|x| refine(b).iter().map(move |y| *x || *y)));
                assert_eq!(kleene_and(a, b), Some(and), "{a} and {b}");
                assert_eq!(kleene_or(a, b), Some(or), "{a} or {b}");
            }
            assert_eq!(kleene_not(a), Some(lift(refine(a).iter().map(|x| !*x))));
        }
        assert_eq!(kleene_and(&Value::Int(1), &Value::Bool(true)), None);
    }

    #[test]
    fn false_absorbs_unknown() {
        assert_eq!(kleene_and(&Value::Bool(false), &Value::Unknown), Some(Value::Bool(false)));
        assert_eq!(kleene_and(&Value::Unknown, &Value::Bool(false)), Some(Value::Bool(false)));
    }

    #[test]
    fn value_text() {
        assert_eq!(parse_value("42"), Some(Value::Int(42)));
        assert_eq!(parse_value("-3"), Some(Value::Int(-3)));
        assert_eq!(parse_value(" true "), Some(Value::Bool(true)));
        assert_eq!(parse_value("unknown"), Some(Value::Unknown));
        assert_eq!(parse_value("\"Drive\""), Some(Value::Str("Drive".into())));
        assert_eq!(parse_value("maybe"), None);
        for v in [Value::Int(-5), Value::Bool(false), Value::Unknown, Value::Str("x y".into())] {
            assert_eq!(parse_value(&alloc::format!("{v}")), Some(v));
        }
    }

    #[test]
    fn keywords_round_trip() {
        for s in Status::ALL {
            assert_eq!(Status::from_keyword(s.keyword()), Some(s));
            assert_eq!(Status::from_name(s.name()), Some(s));
        }
        for o in Outcome::ALL {
            assert_eq!(Outcome::from_keyword(o.keyword()), Some(o));
        }
    }
}
