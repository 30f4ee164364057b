use super::spec::{AtomicSpec, Emit, ExternalRule, InternalRule};
use crate::expr::Expr;
use crate::process::{Assignment, Variable, VariableSpace};
use crate::time::{Span, TimeScalar};
use crate::value::Value;

/// Fluent construction of [`AtomicSpec`]s with expressions given as text.
/// An empty guard string means "always".
pub struct AtomicBuilder<T> {
    id: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    vars: Vec<Variable>,
    init: Vec<Value>,
    internal: Vec<InternalRule<T>>,
    external: Vec<ExternalRule>,
    errors: Vec<String>,
}

/// `(port, msg_type, [(field, expr)])`
pub type EmitSrc<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)]);

impl<T: TimeScalar> AtomicBuilder<T> {
    pub fn new(id: &str) -> Self {
        AtomicBuilder {
            id: id.to_string(),
            inputs: vec![],
            outputs: vec![],
            vars: vec![],
            init: vec![],
            internal: vec![],
            external: vec![],
            errors: vec![],
        }
    }

    pub fn inputs(mut self, ports: &[&str]) -> Self {
        self.inputs.extend(ports.iter().map(|p| p.to_string()));
        self
    }

    pub fn outputs(mut self, ports: &[&str]) -> Self {
        self.outputs.extend(ports.iter().map(|p| p.to_string()));
        self
    }

    pub fn var(mut self, name: &str, domain: Vec<Value>, init: impl Into<Value>) -> Self {
        self.vars.push(Variable::new(name, domain));
        self.init.push(init.into());
        self
    }

    fn parse(&mut self, src: &str) -> Expr {
        Expr::parse(src).unwrap_or_else(|e| {
            self.errors.push(format!("`{src}`: {e}"));
            Expr::bool(false)
        })
    }

    fn guard(&mut self, src: &str) -> Option<Expr> {
        (!src.trim().is_empty()).then(|| self.parse(src))
    }

    fn updates(&mut self, set: &[(&str, &str)]) -> Vec<(String, Expr)> {
        set.iter().map(|(k, v)| (k.to_string(), self.parse(v))).collect()
    }

    pub fn internal(mut self, when: &str, after: Span<T>, emit: &[EmitSrc<'_>], set: &[(&str, &str)]) -> Self {
        let when = self.guard(when);
        let emit = emit
            .iter()
            .map(|(port, ty, fs)| Emit { port: port.to_string(), msg_type: ty.to_string(), fields: self.updates(fs) })
            .collect();
        let set = self.updates(set);
        self.internal.push(InternalRule { when, after, emit, set });
        self
    }

    /// `msg_type` may be empty to accept any type on the port.
    pub fn external(mut self, port: &str, msg_type: &str, when: &str, set: &[(&str, &str)]) -> Self {
        let when = self.guard(when);
        let set = self.updates(set);
        let msg_type = (!msg_type.is_empty()).then(|| msg_type.to_string());
        self.external.push(ExternalRule { port: port.to_string(), msg_type, when, set });
        self
    }

    pub fn build(self) -> Result<AtomicSpec<T>, String> {
        if !self.errors.is_empty() {
            return Err(format!("{}: {}", self.id, self.errors.join("; ")));
        }
        let space = VariableSpace::new(self.vars).map_err(|e| format!("{}: {e}", self.id))?;
        let init = Assignment(self.init);
        space.check(&init).map_err(|e| format!("{}: initial state: {e}", self.id))?;
        Ok(AtomicSpec {
            id: self.id,
            inputs: self.inputs,
            outputs: self.outputs,
            space,
            init,
            internal: self.internal,
            external: self.external,
        })
    }
}
