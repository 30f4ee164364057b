use crate::expr::{Expr, Literal};
use crate::lexer::Pos;

/// Which messages an effect or rule reacts to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub msg_type: String,
    pub from: String,
    pub to: String,
    pub filter: Option<Expr>,
    /// Positions of the message type, sender and receiver names.
    pub spans: [Pos; 3],
}

impl Pattern {
    pub fn new(msg_type: &str, from: &str, to: &str, filter: Option<Expr>) -> Self {
        Pattern { msg_type: msg_type.into(), from: from.into(), to: to.into(), filter, spans: [Pos::default(); 3] }
    }
}

/// `field = literal` items, each with the field name's position.
pub type SetList = Vec<(String, Literal, Pos)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generate {
    pub msg_type: String,
    pub from: String,
    pub to: String,
    pub set: SetList,
    pub spans: [Pos; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Generate(Generate),
    /// `None` ticks is an infinite delay. `drop` is the same operator,
    /// remembered only so the script prints back as written.
    Delay {
        ticks: Option<u64>,
        written_as_drop: bool,
    },
    /// Drops the message and sends a copy with the listed fields replaced.
    Modify(SetList),
    Chain(Vec<(String, Pos)>),
}

impl Operator {
    pub fn drop() -> Self {
        Operator::Delay { ticks: None, written_as_drop: true }
    }

    pub fn delay(ticks: Option<u64>) -> Self {
        Operator::Delay { ticks, written_as_drop: false }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Operator::Generate(_) => "generate",
            Operator::Delay { written_as_drop: true, .. } => "drop",
            Operator::Delay { .. } => "delay",
            Operator::Modify(_) => "modify",
            Operator::Chain(_) => "chain",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EffectDef {
    pub name: String,
    /// Absent for chains, which apply on their members' common trigger.
    pub trigger: Option<Pattern>,
    pub op: Operator,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Activate,
    Deactivate,
}

impl RuleKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RuleKind::Activate => "activate",
            RuleKind::Deactivate => "deactivate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActivationRule {
    pub kind: RuleKind,
    pub effect: String,
    pub effect_pos: Pos,
    pub trigger: Pattern,
    pub given: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EffectProgram {
    pub effects: Vec<EffectDef>,
    pub rules: Vec<ActivationRule>,
}

impl EffectProgram {
    pub fn effect(&self, name: &str) -> Option<&EffectDef> {
        self.effects.iter().find(|e| e.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty() && self.rules.is_empty()
    }

    /// The trigger an effect applies on, following chains to their first
    /// member.
    pub fn trigger_of(&self, name: &str) -> Option<&Pattern> {
        let mut cur = self.effect(name)?;
        for _ in 0..=self.effects.len() {
            match (&cur.trigger, &cur.op) {
                (Some(p), _) => return Some(p),
                (None, Operator::Chain(members)) => cur = self.effect(&members.first()?.0)?,
                _ => return None,
            }
        }
        None
    }
}

/// Script words that cannot be used as names.
pub const SCRIPT_KEYWORDS: &[&str] = &[
    "effect",
    "on",
    "msg",
    "from",
    "to",
    "where",
    "generate",
    "drop",
    "delay",
    "modify",
    "with",
    "chain",
    "activate",
    "deactivate",
    "given",
    "inf",
];
