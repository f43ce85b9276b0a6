//! Rewrite rules over term sets and the relation they define.
//!
//! A rule `l -> r` relates `a` to `b` when some substitution `σ` makes
//! `σ(l)` equal to the *whole* of `a` (modulo ACUI) and `b = σ(r)`. This is
//! substitution closure, not congruence closure: `{A(x)} -> {B(x)}` does not
//! rewrite `{A(0),A(1)}`. Rewriting inside a larger set is the job of
//! [`crate::setrel::async_ext`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lex::{tokenize, Comments, Cursor, ParseError, Tok};
use crate::setrel::{SetRelError, SetRelation, DEFAULT_MAX_SET_SIZE};
use crate::term::{parse_raw_set, Raw, Term, TermSet};

/// A rule variable. In rule text, identifiers starting with a lowercase
/// letter or `_` are variables; everything else is a symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleVar(pub String);

impl fmt::Display for RuleVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A term with variables at argument positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Var(RuleVar),
    Int(i64),
    Bool(bool),
    App { head: String, args: Vec<Pattern> },
}

impl Pattern {
    pub fn var(name: impl Into<String>) -> Self {
        Pattern::Var(RuleVar(name.into()))
    }

    pub fn app(head: impl Into<String>, args: impl IntoIterator<Item = Pattern>) -> Self {
        Pattern::App {
            head: head.into(),
            args: args.into_iter().collect(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<RuleVar>) {
        match self {
            Pattern::Var(v) => {
                out.insert(v.clone());
            }
            Pattern::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    /// Instantiate; `None` if some variable is unbound.
    pub fn apply(&self, sigma: &Substitution) -> Option<Term> {
        Some(match self {
            Pattern::Var(v) => sigma.get(v)?.clone(),
            Pattern::Int(n) => Term::Int(*n),
            Pattern::Bool(b) => Term::Bool(*b),
            Pattern::App { head, args } => Term::App {
                head: head.clone(),
                args: args
                    .iter()
                    .map(|a| a.apply(sigma))
                    .collect::<Option<Vec<_>>>()?,
            },
        })
    }

    /// Extend `sigma` so that `σ(self) = term`; on failure `sigma` is left
    /// in an unspecified state and the caller discards it.
    fn match_into(&self, term: &Term, sigma: &mut Substitution) -> bool {
        match (self, term) {
            (Pattern::Var(v), t) => match sigma.0.get(v) {
                Some(bound) => bound == t,
                None => {
                    sigma.0.insert(v.clone(), t.clone());
                    true
                }
            },
            (Pattern::Int(a), Term::Int(b)) => a == b,
            (Pattern::Bool(a), Term::Bool(b)) => a == b,
            (
                Pattern::App { head, args },
                Term::App {
                    head: th,
                    args: targs,
                },
            ) => {
                head == th
                    && args.len() == targs.len()
                    && args
                        .iter()
                        .zip(targs)
                        .all(|(p, t)| p.match_into(t, sigma))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) => write!(f, "{v}"),
            Pattern::Int(n) => write!(f, "{n}"),
            Pattern::Bool(b) => write!(f, "{b}"),
            Pattern::App { head, args } => {
                f.write_str(head)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A finite set of patterns.
pub type PatternSet = BTreeSet<Pattern>;

fn fmt_pattern_set(set: &PatternSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("{")?;
    for (i, p) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str("}")
}

/// A binding of rule variables to ground terms. Ordered, so collections of
/// substitutions enumerate canonically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<RuleVar, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, v: &RuleVar) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn bind(mut self, v: impl Into<String>, t: Term) -> Self {
        self.0.insert(RuleVar(v.into()), t);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RuleVar, &Term)> {
        self.0.iter()
    }

    pub fn apply_set(&self, patterns: &PatternSet) -> Option<TermSet> {
        patterns.iter().map(|p| p.apply(self)).collect()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("]")
    }
}

/// Every `σ` with `σ(pattern) =ACUI subject`.
///
/// Each pattern element is sent to some subject element, the assignment
/// must cover the subject, and repeated variables must bind equal terms.
/// Two pattern elements may land on the same subject element (idempotence),
/// so `{A(x),A(y)}` matches `{A(0)}` with `x = y = 0`.
pub fn match_set(pattern: &PatternSet, subject: &TermSet) -> BTreeSet<Substitution> {
    let mut out = BTreeSet::new();
    let pats: Vec<&Pattern> = pattern.iter().collect();
    let subj: Vec<&Term> = subject.iter().collect();
    if pats.is_empty() {
        if subj.is_empty() {
            out.insert(Substitution::new());
        }
        return out;
    }
    if subj.len() > pats.len() {
        return out;
    }
    let mut hits = alloc::vec![0usize; subj.len()];
    assign(&pats, &subj, 0, Substitution::new(), &mut hits, &mut out);
    out
}

fn assign(
    pats: &[&Pattern],
    subj: &[&Term],
    i: usize,
    sigma: Substitution,
    hits: &mut [usize],
    out: &mut BTreeSet<Substitution>,
) {
    if i == pats.len() {
        if hits.iter().all(|&h| h > 0) {
            out.insert(sigma);
        }
        return;
    }
    // elements still uncovered must be reachable by the remaining patterns
    let uncovered = hits.iter().filter(|&&h| h == 0).count();
    if uncovered > pats.len() - i {
        return;
    }
    for (j, t) in subj.iter().enumerate() {
        let mut next = sigma.clone();
        if pats[i].match_into(t, &mut next) {
            hits[j] += 1;
            assign(pats, subj, i + 1, next, hits, out);
            hits[j] -= 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(String),
    #[error("rule `{label}`: variable `{var}` occurs on the right but not on the left")]
    UnboundRhsVar { label: String, var: RuleVar },
    #[error("rule `{label}`: variable `{var}` at top level; variables may only appear as arguments")]
    TopLevelVar { label: String, var: RuleVar },
    #[error("duplicate rule label `{0}`")]
    DuplicateLabel(String),
    #[error("symbol `{symbol}` used with arities {first} and {second}")]
    InconsistentArity {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: {source}")]
    Syntax { line: usize, source: ParseError },
}

/// `label : lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    label: String,
    lhs: PatternSet,
    rhs: PatternSet,
}

impl RewriteRule {
    pub fn new(
        label: impl Into<String>,
        lhs: impl IntoIterator<Item = Pattern>,
        rhs: impl IntoIterator<Item = Pattern>,
    ) -> Result<Self, RewriteError> {
        let label = label.into();
        let lhs: PatternSet = lhs.into_iter().collect();
        let rhs: PatternSet = rhs.into_iter().collect();
        if lhs.is_empty() {
            return Err(RewriteError::EmptyLhs(label));
        }
        for p in lhs.iter().chain(&rhs) {
            if let Pattern::Var(v) = p {
                return Err(RewriteError::TopLevelVar {
                    label,
                    var: v.clone(),
                });
            }
        }
        let mut lvars = BTreeSet::new();
        lhs.iter().for_each(|p| p.collect_vars(&mut lvars));
        let mut rvars = BTreeSet::new();
        rhs.iter().for_each(|p| p.collect_vars(&mut rvars));
        if let Some(v) = rvars.difference(&lvars).next() {
            return Err(RewriteError::UnboundRhsVar {
                label,
                var: v.clone(),
            });
        }
        Ok(RewriteRule { label, lhs, rhs })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lhs(&self) -> &PatternSet {
        &self.lhs
    }

    pub fn rhs(&self) -> &PatternSet {
        &self.rhs
    }

    /// Reducts of `a` under this rule alone.
    pub fn reducts(&self, a: &TermSet) -> BTreeSet<TermSet> {
        match_set(&self.lhs, a)
            .iter()
            .filter_map(|sigma| sigma.apply_set(&self.rhs))
            .collect()
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.label)?;
        fmt_pattern_set(&self.lhs, f)?;
        f.write_str(" -> ")?;
        fmt_pattern_set(&self.rhs, f)
    }
}

/// An ordered list of rules with unique labels and consistent arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteSystem {
    rules: Vec<RewriteRule>,
}

impl RewriteSystem {
    pub fn new(rules: impl IntoIterator<Item = RewriteRule>) -> Result<Self, RewriteError> {
        let rules: Vec<_> = rules.into_iter().collect();
        let mut labels = BTreeSet::new();
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &rules {
            if !labels.insert(r.label.as_str()) {
                return Err(RewriteError::DuplicateLabel(r.label.clone()));
            }
            for p in r.lhs.iter().chain(&r.rhs) {
                check_arity(p, &mut arities)?;
            }
        }
        Ok(RewriteSystem { rules })
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The relation defined by this system, with the default set-size cap.
    pub fn relation(&self) -> RewriteRelation {
        relation_of(self.clone())
    }
}

fn check_arity<'a>(
    p: &'a Pattern,
    arities: &mut BTreeMap<&'a str, usize>,
) -> Result<(), RewriteError> {
    if let Pattern::App { head, args } = p {
        match arities.get(head.as_str()) {
            Some(&n) if n != args.len() => {
                return Err(RewriteError::InconsistentArity {
                    symbol: head.clone(),
                    first: n,
                    second: args.len(),
                })
            }
            _ => {
                arities.insert(head, args.len());
            }
        }
        for a in args {
            check_arity(a, arities)?;
        }
    }
    Ok(())
}

impl fmt::Display for RewriteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// The relation `a → b` iff some rule `l → r` and `σ` give `a =ACUI σl` and
/// `b =ACUI σr`.
#[derive(Clone, Debug)]
pub struct RewriteRelation {
    system: RewriteSystem,
    limit: usize,
}

pub fn relation_of(system: RewriteSystem) -> RewriteRelation {
    RewriteRelation {
        system,
        limit: DEFAULT_MAX_SET_SIZE,
    }
}

impl RewriteRelation {
    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn system(&self) -> &RewriteSystem {
        &self.system
    }
}

impl SetRelation for RewriteRelation {
    fn step(&self, a: &TermSet) -> Result<BTreeSet<TermSet>, SetRelError> {
        Ok(self
            .system
            .rules
            .iter()
            .flat_map(|r| r.reducts(a))
            .collect())
    }

    fn max_set_size(&self) -> usize {
        self.limit
    }
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c == '_')
}

fn to_pattern(raw: Raw) -> Pattern {
    match raw {
        Raw::Int(n) => Pattern::Int(n),
        Raw::Bool(b) => Pattern::Bool(b),
        Raw::Ident(s) if is_var_name(&s) => Pattern::Var(RuleVar(s)),
        Raw::Ident(s) => Pattern::app(s, []),
        Raw::App(h, args) => Pattern::app(h, args.into_iter().map(to_pattern)),
    }
}

/// Parse a pattern set such as `{A(x), C}`.
pub fn parse_pattern_set(text: &str) -> Result<PatternSet, ParseError> {
    let mut cur = Cursor::new(tokenize(text, Comments::None)?);
    let raws = parse_raw_set(&mut cur)?;
    cur.expect_eof()?;
    Ok(raws.into_iter().map(to_pattern).collect())
}

fn parse_rule_line(line: &str) -> Result<(String, PatternSet, PatternSet), ParseError> {
    let mut cur = Cursor::new(tokenize(line, Comments::None)?);
    let label = cur.expect_ident()?;
    cur.expect_punct(":")?;
    let lhs = parse_raw_set(&mut cur)?;
    cur.expect_punct("->")?;
    let rhs = if matches!(cur.peek(), Tok::Eof) {
        Vec::new()
    } else {
        parse_raw_set(&mut cur)?
    };
    cur.expect_eof()?;
    Ok((
        label,
        lhs.into_iter().map(to_pattern).collect(),
        rhs.into_iter().map(to_pattern).collect(),
    ))
}

/// Parse a rule file: one `label : lhs -> rhs` per line, `#` starts a
/// comment, blank lines are ignored. An empty right-hand side is written
/// `{}`.
pub fn parse_rules(text: &str) -> Result<RewriteSystem, RewriteError> {
    let mut rules = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let (label, lhs, rhs) = parse_rule_line(line).map_err(|source| RewriteError::Syntax {
            line: idx + 1,
            source,
        })?;
        rules.push(RewriteRule::new(label, lhs, rhs)?);
    }
    RewriteSystem::new(rules)
}

impl core::str::FromStr for RewriteSystem {
    type Err = RewriteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rules(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::term::{parse_termset, termset_of};
    use proptest::prelude::*;

    fn ts(items: &[&str]) -> TermSet {
        termset_of(items.iter().copied()).unwrap()
    }

    fn pats(text: &str) -> PatternSet {
        parse_pattern_set(text).unwrap()
    }

    #[test]
    fn match_examples() {
        let got = match_set(&pats("{A(x)}"), &ts(&["A(0)"]));
        let want: BTreeSet<_> = [Substitution::new().bind("x", Term::Int(0))].into();
        assert_eq!(got, want);

        assert!(match_set(&pats("{A(x)}"), &ts(&["A(0)", "A(1)"])).is_empty());
        assert!(match_set(&pats("{A(x)}"), &ts(&["B(0)"])).is_empty());
    }

    #[test]
    fn repeated_variables_bind_equal_terms() {
        let p = pats("{P(x,x)}");
        assert_eq!(match_set(&p, &ts(&["P(1,1)"])).len(), 1);
        assert!(match_set(&p, &ts(&["P(1,2)"])).is_empty());
    }

    #[test]
    fn idempotent_matching_collapses_patterns() {
        // {A(x),A(y)} covers a one-element set with x = y
        let got = match_set(&pats("{A(x),A(y)}"), &ts(&["A(0)"]));
        assert_eq!(got.len(), 1);
        let got = match_set(&pats("{A(x),A(y)}"), &ts(&["A(0)", "A(1)"]));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn relation_of_examples() {
        let sys = parse_rules("r: A(x) -> B(x)").unwrap();
        let r = relation_of(sys);
        assert!(r.relates(&ts(&["A(0)"]), &ts(&["B(0)"])).unwrap());
        assert!(r.relates(&ts(&["A(1)"]), &ts(&["B(1)"])).unwrap());
        assert!(r.step(&ts(&["A(0)", "A(1)"])).unwrap().is_empty());

        let sys = parse_rules("b: A(x) -> B(x)\nc: A(x) -> C(x)").unwrap();
        let got = relation_of(sys).step(&ts(&["A(0)"])).unwrap();
        let want: BTreeSet<_> = [ts(&["B(0)"]), ts(&["C(0)"])].into();
        assert_eq!(got, want);
    }

    #[test]
    fn redex_enumerator_reports_whole_set_matches_only() {
        let r = relation_of(parse_rules("r: A(x) -> B(x)").unwrap());
        let u = ts(&["A(0)", "A(1)", "B(1)"]);
        let found: Vec<_> = r.redexes(&u).unwrap().into_iter().map(|x| x.set).collect();
        assert_eq!(found, [ts(&["A(0)"]), ts(&["A(1)"])]);
    }

    #[test]
    fn rule_validation() {
        assert!(matches!(
            RewriteRule::new("bad", [], [Pattern::app("B", [])]),
            Err(RewriteError::EmptyLhs(_))
        ));
        assert!(matches!(
            parse_rules("r: A(x) -> B(y)"),
            Err(RewriteError::UnboundRhsVar { .. })
        ));
        assert!(matches!(
            parse_rules("r: A(x) -> B(x)\nr: B(x) -> C(x)"),
            Err(RewriteError::DuplicateLabel(_))
        ));
        assert!(matches!(
            parse_rules("r: A(x) -> A(x,x)"),
            Err(RewriteError::InconsistentArity { .. })
        ));
        assert!(matches!(
            parse_rules("r: x -> A"),
            Err(RewriteError::TopLevelVar { .. })
        ));
        assert!(matches!(
            parse_rules("# header\n\nr: A(x) ->"),
            Ok(ref s) if s.rules()[0].rhs().is_empty()
        ));
        let err = parse_rules("ok: A -> B\nbroken A(").unwrap_err();
        assert!(matches!(err, RewriteError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rules_print_and_reparse() {
        let text = "one : {A(x),C} -> {B(x)}\ntwo : {B(y)} -> {}\n";
        let sys = parse_rules(text).unwrap();
        assert_eq!(sys.to_string(), text);
        assert_eq!(parse_rules(&sys.to_string()).unwrap(), sys);
    }

    fn arb_ground() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![(0i64..3).prop_map(Term::Int), "[A-C]".prop_map(Term::sym)];
        ("[A-C]", prop::collection::vec(leaf, 0..3)).prop_map(|(h, a)| Term::app(h, a))
    }

    /// Abstract some argument positions of a ground term into variables.
    fn abstract_term(t: &Term, mask: u8) -> Pattern {
        match t {
            Term::App { head, args } => Pattern::app(
                head.clone(),
                args.iter().enumerate().map(|(i, a)| {
                    if mask & (1 << i) != 0 {
                        Pattern::var(alloc::format!("v{}", a))
                    } else {
                        abstract_term(a, 0)
                    }
                }),
            ),
            Term::Int(n) => Pattern::Int(*n),
            Term::Bool(b) => Pattern::Bool(*b),
        }
    }

    proptest! {
        #[test]
        fn every_match_instantiates_back_to_subject(
            terms in prop::collection::vec(arb_ground(), 1..4),
            masks in prop::collection::vec(any::<u8>(), 4),
            extra in prop::collection::vec(arb_ground(), 0..2),
        ) {
            let pattern: PatternSet = terms
                .iter()
                .zip(&masks)
                .map(|(t, m)| abstract_term(t, *m))
                .collect();
            let subject: TermSet = terms.iter().cloned().chain(extra).collect();
            for sigma in match_set(&pattern, &subject) {
                prop_assert_eq!(sigma.apply_set(&pattern).unwrap(), subject.clone());
            }
            // the unextended subject is always matched
            let own: TermSet = terms.iter().cloned().collect();
            prop_assert!(!match_set(&pattern, &own).is_empty());
        }

        /// A multi-element set is a redex only if one lhs covers it whole.
        #[test]
        fn substitution_closure_not_congruence(a in 0i64..3, b in 0i64..3) {
            prop_assume!(a != b);
            let r = relation_of(parse_rules("r: A(x) -> B(x)").unwrap());
            let u = parse_termset(&alloc::format!("{{A({a}),A({b})}}")).unwrap();
            prop_assert!(r.step(&u).unwrap().is_empty());
            for t in u.iter() {
                prop_assert!(!r.step(&TermSet::singleton(t.clone())).unwrap().is_empty());
            }
        }
    }
}
