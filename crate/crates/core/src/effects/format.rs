use std::fmt::Write;

use super::ast::*;
use crate::expr::{is_plain_ident, Literal};

fn literal(l: &Literal) -> String {
    match l {
        Literal::Str(s) if is_plain_ident(s) => s.clone(),
        other => other.to_string(),
    }
}

fn setlist(items: &SetList) -> String {
    items.iter().map(|(f, v, _)| format!("{f} = {}", literal(v))).collect::<Vec<_>>().join(", ")
}

fn pattern(p: &Pattern) -> String {
    let mut s = format!("msg {} from {} to {}", p.msg_type, p.from, p.to);
    if let Some(e) = &p.filter {
        write!(s, " where {e}").unwrap();
    }
    s
}

/// Canonical text: effects in definition order, then rules, with minimal
/// parentheses in expressions.
pub fn format_program(prog: &EffectProgram) -> String {
    let mut out = String::new();
    for e in &prog.effects {
        match (&e.trigger, &e.op) {
            (_, Operator::Chain(members)) => {
                let names: Vec<&str> = members.iter().map(|(n, _)| n.as_str()).collect();
                writeln!(out, "effect {} = chain({});", e.name, names.join(", ")).unwrap();
            }
            (Some(p), op) => {
                writeln!(out, "effect {} on {}", e.name, pattern(p)).unwrap();
                let body = match op {
                    Operator::Generate(g) => {
                        format!("generate msg {} from {} to {} with {}", g.msg_type, g.from, g.to, setlist(&g.set))
                    }
                    Operator::Delay { written_as_drop: true, .. } => "drop".to_string(),
                    Operator::Delay { ticks: Some(n), .. } => format!("delay {n}"),
                    Operator::Delay { ticks: None, .. } => "delay inf".to_string(),
                    Operator::Modify(set) => format!("modify {}", setlist(set)),
                    Operator::Chain(_) => unreachable!(),
                };
                writeln!(out, "  {body};").unwrap();
            }
            (None, _) => unreachable!("non-chain effects always have a trigger"),
        }
    }
    for r in &prog.rules {
        let p = &r.trigger;
        write!(out, "{} {} on msg {} from {} to {}", r.kind.keyword(), r.effect, p.msg_type, p.from, p.to).unwrap();
        if let Some(e) = &p.filter {
            write!(out, "\n  where {e}").unwrap();
        }
        if let Some(g) = &r.given {
            write!(out, "\n  given {g}").unwrap();
        }
        out.push_str(";\n");
    }
    out
}
