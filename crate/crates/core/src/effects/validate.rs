use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::*;
use crate::expr::{Expr, Literal};
use crate::lexer::Pos;
use crate::value::Value;

/// What a script may refer to: components with their state variables, and
/// message types with their fields. An empty field domain accepts anything.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Catalog {
    pub components: BTreeMap<String, Vec<String>>,
    pub messages: BTreeMap<String, BTreeMap<String, Vec<Value>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    UnknownComponent,
    UnknownMessageType,
    UnknownField,
    InvalidValue,
    TriggerMismatchInChain,
    UnknownEffect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.pos, self.kind, self.message)
    }
}

struct Checker<'a> {
    cat: &'a Catalog,
    out: Vec<Diagnostic>,
}

fn key(p: Pos) -> (u32, u32) {
    (p.line, p.col)
}

impl Checker<'_> {
    fn report(&mut self, kind: DiagnosticKind, pos: Pos, message: String) {
        self.out.push(Diagnostic { kind, pos, message });
    }

    fn component(&mut self, name: &str, pos: Pos) {
        if !self.cat.components.contains_key(name) {
            self.report(DiagnosticKind::UnknownComponent, pos, format!("unknown component `{name}`"));
        }
    }

    fn msg_type(&mut self, name: &str, pos: Pos) -> Option<&BTreeMap<String, Vec<Value>>> {
        let cat = self.cat;
        let found = cat.messages.get(name);
        if found.is_none() {
            self.report(DiagnosticKind::UnknownMessageType, pos, format!("unknown message type `{name}`"));
        }
        found
    }

    fn is_symbol(&self, s: &str) -> bool {
        let v = Value::sym(s);
        self.cat.messages.values().flat_map(|f| f.values()).any(|d| d.contains(&v))
    }

    fn value_in(&mut self, field: &str, domain: &[Value], v: &Value, pos: Pos) {
        if !domain.is_empty() && !domain.contains(v) {
            self.report(DiagnosticKind::InvalidValue, pos, format!("`{v}` is not a valid value of `{field}`"));
        }
    }

    fn setlist(&mut self, msg_type: &str, fields: Option<&BTreeMap<String, Vec<Value>>>, set: &SetList) {
        let Some(fields) = fields else { return };
        for (f, lit, pos) in set {
            match fields.get(f) {
                None => self.report(DiagnosticKind::UnknownField, *pos, format!("`{msg_type}` has no field `{f}`")),
                Some(domain) => self.value_in(f, domain, &lit.to_value(), *pos),
            }
        }
    }

    /// Dotted names read the observation store: `MsgType.field` or
    /// `Component.var`.
    fn store_name(&mut self, path: &[String], pos: Pos) {
        let [head, tail] = path else {
            self.report(DiagnosticKind::UnknownField, pos, format!("`{}` has too many parts", path.join(".")));
            return;
        };
        if let Some(fields) = self.cat.messages.get(head) {
            if !fields.contains_key(tail) {
                self.report(DiagnosticKind::UnknownField, pos, format!("`{head}` has no field `{tail}`"));
            }
        } else if let Some(vars) = self.cat.components.get(head) {
            let is_field = self.cat.messages.values().any(|f| f.contains_key(tail));
            if !vars.contains(tail) && !is_field {
                self.report(DiagnosticKind::UnknownField, pos, format!("`{head}` has no state variable `{tail}`"));
            }
        } else {
            self.report(
                DiagnosticKind::UnknownComponent,
                pos,
                format!("`{head}` is neither a message type nor a component"),
            );
        }
    }

    /// `fields` gives the message the expression is evaluated against, if any.
    fn expr(&mut self, e: &Expr, fields: Option<&BTreeMap<String, Vec<Value>>>) {
        let mut value_checked = BTreeSet::new();
        if let Some(fields) = fields {
            for (_, a, b) in e.comparisons() {
                for (lhs, rhs) in [(a, b), (b, a)] {
                    let Expr::Name(path, _) = lhs else { continue };
                    let [field] = path.as_slice() else { continue };
                    let Some(domain) = fields.get(field) else { continue };
                    match rhs {
                        Expr::Lit(lit, pos) => self.value_in(field, domain, &lit.to_value(), *pos),
                        Expr::Name(p, pos) if p.len() == 1 && !fields.contains_key(&p[0]) && p[0] != "time" => {
                            self.value_in(field, domain, &Literal::Str(p[0].clone()).to_value(), *pos);
                            value_checked.insert(key(*pos));
                        }
                        _ => {}
                    }
                }
            }
        }
        for (path, pos) in e.names() {
            if value_checked.contains(&key(pos)) {
                continue;
            }
            match path {
                [single] => {
                    let known =
                        single == "time" || fields.is_some_and(|f| f.contains_key(single)) || self.is_symbol(single);
                    if !known {
                        self.report(DiagnosticKind::UnknownField, pos, format!("unknown name `{single}`"));
                    }
                }
                _ => self.store_name(path, pos),
            }
        }
    }

    fn pattern(&mut self, p: &Pattern) {
        let fields = self.msg_type(&p.msg_type, p.spans[0]).cloned();
        self.component(&p.from, p.spans[1]);
        self.component(&p.to, p.spans[2]);
        if let (Some(e), Some(f)) = (&p.filter, &fields) {
            self.expr(e, Some(f));
        }
    }
}

/// Resolves every reference in the program against the catalog. An empty
/// result means the program is valid.
pub fn validate(prog: &EffectProgram, cat: &Catalog) -> Vec<Diagnostic> {
    let mut c = Checker { cat, out: Vec::new() };
    for e in &prog.effects {
        if let Some(p) = &e.trigger {
            c.pattern(p);
        }
        match &e.op {
            Operator::Generate(g) => {
                let fields = c.msg_type(&g.msg_type, g.spans[0]).cloned();
                c.component(&g.from, g.spans[1]);
                c.component(&g.to, g.spans[2]);
                c.setlist(&g.msg_type, fields.as_ref(), &g.set);
            }
            Operator::Modify(set) => {
                let p = e.trigger.as_ref().expect("modify has a trigger");
                let fields = cat.messages.get(&p.msg_type);
                c.setlist(&p.msg_type, fields, set);
            }
            Operator::Chain(members) => {
                let first = members.first().and_then(|(m, _)| prog.trigger_of(m));
                if let Some((m, pos)) = members.iter().skip(1).find(|(m, _)| prog.trigger_of(m) != first) {
                    c.report(
                        DiagnosticKind::TriggerMismatchInChain,
                        *pos,
                        format!("`{m}` triggers differently from `{}`", members[0].0),
                    );
                }
            }
            Operator::Delay { .. } => {}
        }
    }
    for r in &prog.rules {
        if prog.effect(&r.effect).is_none() {
            c.report(DiagnosticKind::UnknownEffect, r.effect_pos, format!("unknown effect `{}`", r.effect));
        }
        c.pattern(&r.trigger);
        if let Some(g) = &r.given {
            c.expr(g, None);
        }
    }
    c.out
}
