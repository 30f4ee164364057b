use std::collections::BTreeMap;

use super::ast::*;
use super::ScriptError;
use crate::expr::{is_reserved, Cursor, ExprParseError};
use crate::lexer::{tokenize, Pos, Tok};

impl From<ExprParseError> for ScriptError {
    fn from(e: ExprParseError) -> Self {
        match e {
            ExprParseError::Lex(l) => {
                ScriptError::Syntax { pos: l.pos, expected: "a valid token".into(), found: l.message }
            }
            ExprParseError::Syntax { pos, expected, found } => ScriptError::Syntax { pos, expected, found },
        }
    }
}

pub fn parse_script(src: &str) -> Result<EffectProgram, ScriptError> {
    let toks = tokenize(src).map_err(ExprParseError::from)?;
    let mut p = Parser { c: Cursor::new(&toks) };
    let mut prog = EffectProgram::default();
    while p.c.peek().tok != Tok::Eof {
        p.statement(&mut prog)?;
    }
    check_chains(&prog)?;
    Ok(prog)
}

struct Parser<'a> {
    c: Cursor<'a>,
}

impl Parser<'_> {
    fn name(&mut self, what: &str) -> Result<(String, Pos), ScriptError> {
        match &self.c.peek().tok {
            Tok::Ident(s) if !is_reserved(s) && !SCRIPT_KEYWORDS.contains(&s.as_str()) => {
                let (s, pos) = self.c.ident(what)?;
                Ok((s, pos))
            }
            _ => Err(self.c.error(what).into()),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ScriptError> {
        Ok(self.c.expect_keyword(kw)?)
    }

    fn semi(&mut self) -> Result<(), ScriptError> {
        self.c.expect(&Tok::Semi, "`;`")?;
        Ok(())
    }

    fn statement(&mut self, prog: &mut EffectProgram) -> Result<(), ScriptError> {
        let pos = self.c.peek().pos;
        if self.c.eat_keyword("effect") {
            let def = self.effect(pos)?;
            prog.effects.push(def);
        } else if self.c.is_keyword("activate") || self.c.is_keyword("deactivate") {
            let kind = if self.c.eat_keyword("activate") {
                RuleKind::Activate
            } else {
                self.c.bump();
                RuleKind::Deactivate
            };
            let (effect, effect_pos) = self.name("effect name")?;
            self.keyword("on")?;
            let trigger = self.pattern()?;
            let given = if self.c.eat_keyword("given") { Some(self.c.expr()?) } else { None };
            self.semi()?;
            prog.rules.push(ActivationRule { kind, effect, effect_pos, trigger, given, pos });
        } else {
            return Err(self.c.error("`effect`, `activate` or `deactivate`").into());
        }
        Ok(())
    }

    fn effect(&mut self, pos: Pos) -> Result<EffectDef, ScriptError> {
        let (name, _) = self.name("effect name")?;
        if self.c.peek().tok == Tok::Assign {
            self.c.bump();
            self.keyword("chain")?;
            self.c.expect(&Tok::LParen, "`(`")?;
            let mut members = vec![self.name("effect name")?];
            while self.c.peek().tok == Tok::Comma {
                self.c.bump();
                members.push(self.name("effect name")?);
            }
            self.c.expect(&Tok::RParen, "`,` or `)`")?;
            self.semi()?;
            return Ok(EffectDef { name, trigger: None, op: Operator::Chain(members), pos });
        }
        self.keyword("on")?;
        let trigger = self.pattern()?;
        let op = if self.c.eat_keyword("generate") {
            self.keyword("msg")?;
            let (msg_type, p0) = self.name("message type")?;
            self.keyword("from")?;
            let (from, p1) = self.name("component")?;
            self.keyword("to")?;
            let (to, p2) = self.name("component")?;
            self.keyword("with")?;
            let set = self.setlist()?;
            Operator::Generate(Generate { msg_type, from, to, set, spans: [p0, p1, p2] })
        } else if self.c.eat_keyword("drop") {
            Operator::drop()
        } else if self.c.eat_keyword("delay") {
            match self.c.peek().tok {
                Tok::Int(n) => {
                    self.c.bump();
                    Operator::delay(Some(n as u64))
                }
                _ if self.c.eat_keyword("inf") => Operator::delay(None),
                _ => return Err(self.c.error("tick count or `inf`").into()),
            }
        } else if self.c.eat_keyword("modify") {
            Operator::Modify(self.setlist()?)
        } else {
            let expected = if trigger.filter.is_some() {
                "an operator or the rest of the `where` expression"
            } else {
                "`where`, `generate`, `drop`, `delay` or `modify`"
            };
            return Err(self.c.error(expected).into());
        };
        self.semi()?;
        Ok(EffectDef { name, trigger: Some(trigger), op, pos })
    }

    fn pattern(&mut self) -> Result<Pattern, ScriptError> {
        self.keyword("msg")?;
        let (msg_type, p0) = self.name("message type")?;
        self.keyword("from")?;
        let (from, p1) = self.name("component")?;
        self.keyword("to")?;
        let (to, p2) = self.name("component")?;
        let filter = if self.c.eat_keyword("where") { Some(self.c.expr()?) } else { None };
        Ok(Pattern { msg_type, from, to, filter, spans: [p0, p1, p2] })
    }

    fn setlist(&mut self) -> Result<SetList, ScriptError> {
        let mut out = Vec::new();
        loop {
            let (field, pos) = self.name("field name")?;
            self.c.expect(&Tok::Assign, "`=`")?;
            let (lit, _, _) = self.c.literal_value()?;
            out.push((field, lit, pos));
            if self.c.peek().tok != Tok::Comma {
                return Ok(out);
            }
            self.c.bump();
        }
    }
}

/// Names are unique; chain members are defined earlier and never reach
/// back to the chain itself.
fn check_chains(prog: &EffectProgram) -> Result<(), ScriptError> {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, e) in prog.effects.iter().enumerate() {
        if index.insert(&e.name, i).is_some() {
            return Err(ScriptError::DuplicateEffectName { name: e.name.clone(), pos: e.pos });
        }
    }
    let members = |i: usize| -> &[(String, Pos)] {
        match &prog.effects[i].op {
            Operator::Chain(m) => m,
            _ => &[],
        }
    };
    for (i, e) in prog.effects.iter().enumerate() {
        for (m, pos) in members(i) {
            // does `m` lead back to `e`?
            let mut stack = vec![m.as_str()];
            let mut seen = Vec::new();
            while let Some(n) = stack.pop() {
                if n == e.name {
                    return Err(ScriptError::CyclicChain { name: e.name.clone(), pos: *pos });
                }
                if seen.contains(&n) {
                    continue;
                }
                seen.push(n);
                if let Some(&j) = index.get(n) {
                    stack.extend(members(j).iter().map(|(s, _)| s.as_str()));
                }
            }
            match index.get(m.as_str()) {
                Some(&j) if j < i => {}
                _ => return Err(ScriptError::UnknownEffectInChain { name: m.clone(), pos: *pos }),
            }
        }
    }
    Ok(())
}
