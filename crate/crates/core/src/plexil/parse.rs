//! Plan parser.
//!
//! ```text
//! node   := TYPE IDENT '{' item* '}'
//! item   := decl | clause | node
//! decl   := ('int' | 'bool') IDENT '=' literal ';'
//! clause := COND ':' expr ';' | 'Command' ':' IDENT '(' args ')' ';'
//!         | 'Assignment' ':' IDENT ':=' expr ';' | 'Priority' ':' INT ';'
//! ```
//!
//! Expressions, loosest first: `OR`, `AND`, `NOT`, comparisons (not
//! chained), `+ -`, `*`, atoms. Atoms are literals, `UNKNOWN`, status and
//! outcome constants (`FINISHED`, `SUCCESS`, ...), `LookupOnChange(name)`,
//! `Lookup(name)`, `node.status`, `node.outcome`, variables and parenthesized
//! expressions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{AssignmentAst, BinOp, CommandCall, Cond, Decl, Expr, NodeAst, PlanAst, VarType};
use super::value::{NodeType, Outcome, Status, Value};
use crate::lex::{tokenize, Comments, Cursor, ParseError, Tok};

pub fn parse_plan(text: &str) -> Result<PlanAst, ParseError> {
    let mut cur = Cursor::new(tokenize(text, Comments::DoubleSlash)?);
    let root = parse_node(&mut cur)?;
    cur.expect_eof()?;
    Ok(PlanAst { root })
}

/// Parse a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr<String>, ParseError> {
    let mut cur = Cursor::new(tokenize(text, Comments::DoubleSlash)?);
    let e = expr(&mut cur)?;
    cur.expect_eof()?;
    Ok(e)
}

fn parse_node(cur: &mut Cursor) -> Result<NodeAst, ParseError> {
    let pos = cur.pos();
    let kind_name = cur.expect_ident()?;
    let kind = NodeType::from_name(&kind_name)
        .ok_or_else(|| ParseError::new(pos, format!("unknown node type `{kind_name}`")))?;
    let mut node = NodeAst::new(kind, cur.expect_ident()?);
    cur.expect_punct("{")?;

    loop {
        if cur.eat_punct("}") {
            return Ok(node);
        }
        let pos = cur.pos();
        let word = match cur.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(cur.unexpected("a declaration, clause, node or `}`")),
        };

        if matches!(cur.peek_at(1), Tok::Ident(_)) && matches!(cur.peek_at(2), Tok::Punct("{")) {
            if node.kind != NodeType::List {
                return Err(ParseError::new(
                    pos,
                    format!("{} node `{}` cannot have children", node.kind, node.name),
                ));
            }
            let child = parse_node(cur)?;
            if node.children.iter().any(|c| c.name == child.name) {
                return Err(ParseError::new(
                    pos,
                    format!("duplicate node name `{}` in `{}`", child.name, node.name),
                ));
            }
            node.children.push(child);
            continue;
        }

        if word == "int" || word == "bool" {
            cur.bump();
            let ty = if word == "int" { VarType::Int } else { VarType::Bool };
            let name_pos = cur.pos();
            let name = cur.expect_ident()?;
            if node.decls.iter().any(|d| d.name == name) {
                return Err(ParseError::new(name_pos, format!("variable `{name}` declared twice")));
            }
            cur.expect_punct("=")?;
            let lit_pos = cur.pos();
            let init = match (ty, literal(cur)?) {
                (VarType::Int, v @ Value::Int(_)) | (VarType::Bool, v @ Value::Bool(_)) => v,
                (_, Value::Unknown) => Value::Unknown,
                (_, v) => {
                    return Err(ParseError::new(
                        lit_pos,
                        format!("{} variable `{name}` initialized with {v}", ty.keyword()),
                    ))
                }
            };
            cur.expect_punct(";")?;
            node.decls.push(Decl { ty, name, init });
            continue;
        }

        cur.bump();
        let keyword = if word == "Repeat" && cur.at_punct("-") {
            cur.bump();
            let rest = cur.expect_ident()?;
            format!("Repeat-{rest}")
        } else {
            word
        };
        cur.expect_punct(":")?;
        match keyword.as_str() {
            "Command" => {
                if node.kind != NodeType::Command {
                    return Err(ParseError::new(pos, "`Command:` clause outside a Command node"));
                }
                if node.command.is_some() {
                    return Err(ParseError::new(pos, "duplicate `Command:` clause"));
                }
                let name = cur.expect_ident()?;
                cur.expect_punct("(")?;
                let mut args = Vec::new();
                if !cur.eat_punct(")") {
                    loop {
                        args.push(expr(cur)?);
                        if cur.eat_punct(")") {
                            break;
                        }
                        cur.expect_punct(",")?;
                    }
                }
                node.command = Some(CommandCall { name, args });
            }
            "Assignment" => {
                if node.kind != NodeType::Assignment {
                    return Err(ParseError::new(
                        pos,
                        "`Assignment:` clause outside an Assignment node",
                    ));
                }
                if node.assignment.is_some() {
                    return Err(ParseError::new(pos, "duplicate `Assignment:` clause"));
                }
                let target = cur.expect_ident()?;
                cur.expect_punct(":=")?;
                node.assignment = Some(AssignmentAst {
                    target,
                    expr: expr(cur)?,
                });
            }
            "Priority" => {
                if node.kind != NodeType::Assignment {
                    return Err(ParseError::new(pos, "`Priority:` clause outside an Assignment node"));
                }
                if node.priority.is_some() {
                    return Err(ParseError::new(pos, "duplicate `Priority:` clause"));
                }
                match cur.bump() {
                    Tok::Int(n) if n >= 0 => node.priority = Some(n as u64),
                    _ => return Err(ParseError::new(pos, "priority must be a natural number")),
                }
            }
            other => {
                let c = Cond::from_keyword(other).ok_or_else(|| {
                    ParseError::new(pos, format!("unknown condition keyword `{other}`"))
                })?;
                if node.condition(c).is_some() {
                    return Err(ParseError::new(pos, format!("duplicate `{other}:` clause")));
                }
                node.conditions.push((c, expr(cur)?));
            }
        }
        cur.expect_punct(";")?;
    }
}

fn literal(cur: &mut Cursor) -> Result<Value, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Tok::Int(n) => Ok(Value::Int(n)),
        Tok::Punct("-") => match cur.bump() {
            Tok::Int(n) => Ok(Value::Int(-n)),
            _ => Err(ParseError::new(pos, "expected an integer after `-`")),
        },
        Tok::Ident(s) if s == "true" => Ok(Value::Bool(true)),
        Tok::Ident(s) if s == "false" => Ok(Value::Bool(false)),
        Tok::Ident(s) if s == "UNKNOWN" => Ok(Value::Unknown),
        Tok::Str(s) => Ok(Value::Str(s)),
        t => Err(ParseError::new(pos, format!("expected a literal, found {t}"))),
    }
}

fn expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let mut l = and_expr(cur)?;
    while eat_word(cur, "OR") {
        l = Expr::bin(BinOp::Or, l, and_expr(cur)?);
    }
    Ok(l)
}

fn and_expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let mut l = not_expr(cur)?;
    while eat_word(cur, "AND") {
        l = Expr::bin(BinOp::And, l, not_expr(cur)?);
    }
    Ok(l)
}

fn not_expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    if eat_word(cur, "NOT") {
        return Ok(Expr::not(not_expr(cur)?));
    }
    cmp_expr(cur)
}

fn cmp_expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let l = add_expr(cur)?;
    let op = match cur.peek() {
        Tok::Punct("==") => BinOp::Eq,
        Tok::Punct("!=") => BinOp::Ne,
        Tok::Punct("<") => BinOp::Lt,
        Tok::Punct(">") => BinOp::Gt,
        Tok::Punct("<=") => BinOp::Le,
        Tok::Punct(">=") => BinOp::Ge,
        _ => return Ok(l),
    };
    cur.bump();
    Ok(Expr::bin(op, l, add_expr(cur)?))
}

fn add_expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let mut l = mul_expr(cur)?;
    loop {
        let op = match cur.peek() {
            Tok::Punct("+") => BinOp::Add,
            Tok::Punct("-") => BinOp::Sub,
            _ => return Ok(l),
        };
        cur.bump();
        l = Expr::bin(op, l, mul_expr(cur)?);
    }
}

fn mul_expr(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let mut l = unary(cur)?;
    while cur.eat_punct("*") {
        l = Expr::bin(BinOp::Mul, l, unary(cur)?);
    }
    Ok(l)
}

fn unary(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    if cur.at_punct("-") {
        if let Tok::Int(n) = cur.peek_at(1).clone() {
            cur.bump();
            cur.bump();
            return Ok(Expr::Lit(Value::Int(-n)));
        }
        cur.bump();
        return Ok(Expr::bin(BinOp::Sub, Expr::Lit(Value::Int(0)), unary(cur)?));
    }
    atom(cur)
}

fn atom(cur: &mut Cursor) -> Result<Expr<String>, ParseError> {
    let pos = cur.pos();
    match cur.peek().clone() {
        Tok::Int(n) => {
            cur.bump();
            Ok(Expr::Lit(Value::Int(n)))
        }
        Tok::Str(s) => {
            cur.bump();
            Ok(Expr::Lit(Value::Str(s)))
        }
        Tok::Punct("(") => {
            cur.bump();
            let e = expr(cur)?;
            cur.expect_punct(")")?;
            Ok(e)
        }
        Tok::Ident(name) => {
            cur.bump();
            match name.as_str() {
                "true" => return Ok(Expr::Lit(Value::Bool(true))),
                "false" => return Ok(Expr::Lit(Value::Bool(false))),
                "UNKNOWN" => return Ok(Expr::Lit(Value::Unknown)),
                "AND" | "OR" | "NOT" => {
                    return Err(ParseError::new(pos, format!("expected an operand, found `{name}`")))
                }
                "LookupOnChange" | "Lookup" if cur.at_punct("(") => {
                    cur.bump();
                    let mut target = cur.expect_ident()?;
                    while cur.eat_punct(".") {
                        target.push('.');
                        target.push_str(&cur.expect_ident()?);
                    }
                    cur.expect_punct(")")?;
                    return Ok(Expr::Lookup(target));
                }
                _ => {}
            }
            if Status::from_keyword(&name).is_some() || Outcome::from_keyword(&name).is_some() {
                return Ok(Expr::Lit(Value::Str(name)));
            }
            if cur.eat_punct(".") {
                let fpos = cur.pos();
                let field = cur.expect_ident()?;
                return match field.as_str() {
                    "status" | "Status" => Ok(Expr::NodeStatus(name)),
                    "outcome" | "Outcome" => Ok(Expr::NodeOutcome(name)),
                    _ => Err(ParseError::new(fpos, format!("unknown node field `{field}`"))),
                };
            }
            Ok(Expr::Var(name))
        }
        _ => Err(cur.unexpected("an expression")),
    }
}

fn eat_word(cur: &mut Cursor, w: &str) -> bool {
    if matches!(cur.peek(), Tok::Ident(s) if s == w) {
        cur.bump();
        true
    } else {
        false
    }
}
