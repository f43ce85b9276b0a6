#![allow(dead_code)]

use syncrel_core::plexil::{compile, parse_plan, ExecutionState, QualifiedName, Status, Value};

pub const SAFEDRIVE: &str = "
List SafeDrive {
  int pictures = 0;
  End:
    LookupOnChange(WheelStuck) == true  OR  pictures == 10;
  List Loop {
    Repeat-while:
      LookupOnChange(WheelStuck) == false;
    Command OneMeter {
      Command: Drive(1);
    }
    Command TakePic {
      Start: OneMeter.status == FINISHED  AND  pictures < 10;
      Command: TakePicture();
    }
    Assignment Counter {
      Start: TakePic.status == FINISHED;
      Pre: pictures < 10;
      Assignment: pictures := pictures + 1;
    }
  }
}
";

/// One Assignment node under a root whose invariant and the node's own
/// conditions are read from the environment.
pub const FIG3: &str = "
List Root {
  int x = 0;
  Inv: LookupOnChange(RootInv);
  Assignment A {
    Inv: LookupOnChange(AInv);
    End: LookupOnChange(AEnd);
    Post: LookupOnChange(APost);
    Assignment: x := 7;
  }
}
";

pub fn race(p1: u64, p2: u64) -> String {
    format!(
        "List Root {{
  int x = 0;
  Assignment A {{ Assignment: x := 1; Priority: {p1}; }}
  Assignment B {{ Assignment: x := 2; Priority: {p2}; }}
}}"
    )
}

pub const CYCLIC: &str = "List Cyclic { Empty Tick { Repeat-while: true; } }";

pub fn state(text: &str) -> ExecutionState {
    compile(&parse_plan(text).unwrap()).unwrap()
}

pub fn qn(dotted: &str) -> QualifiedName {
    QualifiedName::parse(dotted).unwrap()
}

pub fn set_status(s: &mut ExecutionState, dotted: &str, st: Status) {
    s.nodes.get_mut(&qn(dotted)).unwrap().status = st;
}

pub fn set_env(s: &mut ExecutionState, name: &str, v: Value) {
    s.external.insert(name.into(), v);
}

/// The scripted SafeDrive run: start, ten drive/picture rounds with
/// alternating acknowledgements, then the wheel gets stuck.
pub fn safedrive_events() -> Vec<Vec<(String, Value)>> {
    let ev = |pairs: &[(&str, bool)]| -> Vec<(String, Value)> {
        pairs.iter().map(|(n, b)| (n.to_string(), Value::Bool(*b))).collect()
    };
    let one = "OneMeter.Loop.SafeDrive.ack";
    let pic = "TakePic.Loop.SafeDrive.ack";
    let mut out = vec![ev(&[("WheelStuck", false)])];
    for _ in 0..10 {
        out.push(ev(&[(one, true), (pic, false)]));
        out.push(ev(&[(one, false), (pic, true)]));
    }
    out.push(ev(&[("WheelStuck", true)]));
    out
}
