//! The effect-script language: syntax tree, parser, canonical formatter
//! and validation against a scenario.

mod ast;
mod format;
mod parser;
mod validate;

pub use ast::{
    ActivationRule, EffectDef, EffectProgram, Generate, Operator, Pattern, RuleKind, SetList, SCRIPT_KEYWORDS,
};
pub use format::format_program;
pub use parser::parse_script;
pub use validate::{validate, Catalog, Diagnostic, DiagnosticKind};

use crate::lexer::Pos;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
    #[error("{pos}: effect `{name}` is defined twice")]
    DuplicateEffectName { name: String, pos: Pos },
    #[error("{pos}: chain member `{name}` is not defined before the chain")]
    UnknownEffectInChain { name: String, pos: Pos },
    #[error("{pos}: chain `{name}` contains itself")]
    CyclicChain { name: String, pos: Pos },
}

impl ScriptError {
    pub fn pos(&self) -> Pos {
        match self {
            ScriptError::Syntax { pos, .. }
            | ScriptError::DuplicateEffectName { pos, .. }
            | ScriptError::UnknownEffectInChain { pos, .. }
            | ScriptError::CyclicChain { pos, .. } => *pos,
        }
    }
}
