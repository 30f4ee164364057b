//! Atomic model behavior.

use super::message::{Message, Output};
use super::spec::{AtomicSpec, Updates};
use super::trace::{Detail, EventKind, StateSnapshot};
use crate::expr::{Env, Expr};
use crate::time::{Span, TimeScalar};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ModelError(pub String);

/// Extra trace record produced by a model during a transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Note {
    pub kind: EventKind,
    pub detail: Detail,
}

/// Per-transition access to the kernel.
pub struct Ctx<'a, T> {
    now: T,
    next_id: &'a mut u64,
    notes: &'a mut Vec<Note>,
}

impl<'a, T: TimeScalar> Ctx<'a, T> {
    pub fn new(now: T, next_id: &'a mut u64, notes: &'a mut Vec<Note>) -> Self {
        Ctx { now, next_id, notes }
    }

    pub fn now(&self) -> T {
        self.now
    }

    /// A fresh message id for an output sent later.
    pub fn reserve_id(&mut self) -> u64 {
        let id = *self.next_id;
        *self.next_id += 1;
        id
    }

    pub fn record(&mut self, kind: EventKind, detail: Detail) {
        self.notes.push(Note { kind, detail });
    }
}

/// A DEVS atomic model. Output is requested only at internal event instants,
/// immediately before `delta_int` or `delta_con`.
pub trait Atomic<T: TimeScalar>: Send {
    fn ta(&self) -> Span<T>;

    fn delta_int(&mut self, ctx: &mut Ctx<'_, T>) -> Result<(), ModelError>;

    fn delta_ext(&mut self, ctx: &mut Ctx<'_, T>, elapsed: T, bag: &[Message<T>]) -> Result<(), ModelError>;

    /// Defaults to the internal transition followed by the external one.
    fn delta_con(&mut self, ctx: &mut Ctx<'_, T>, bag: &[Message<T>]) -> Result<(), ModelError> {
        self.delta_int(ctx)?;
        if !bag.is_empty() {
            self.delta_ext(ctx, T::zero(), bag)?;
        }
        Ok(())
    }

    fn output(&self, now: T) -> Result<Vec<Output>, ModelError>;

    fn snapshot(&self) -> StateSnapshot;

    /// A relay reacts to input within the same micro-step and forwards its
    /// zero-delay output in that step too, acting like a stateful coupling.
    /// Its trace records are kept, but receivers see relayed messages in the
    /// same bags as if they had been sent directly.
    fn is_relay(&self) -> bool {
        false
    }

    /// Called on relays at the start of every micro-step, before outputs
    /// are collected. Lets a relay hold zero-delay output back until the
    /// next micro-step of the same instant.
    fn begin_micro_step(&mut self) {}
}

/// Executes an [`AtomicSpec`].
#[derive(Clone, Debug)]
pub struct RuleModel<T> {
    spec: AtomicSpec<T>,
    state: Vec<Value>,
    /// Index of the internal rule currently scheduled.
    scheduled: Option<usize>,
    sigma: Span<T>,
}

impl<T: TimeScalar> RuleModel<T> {
    pub fn new(spec: AtomicSpec<T>) -> Result<Self, ModelError> {
        spec.space.check(&spec.init).map_err(|e| ModelError(format!("{}: initial state: {e}", spec.id)))?;
        let state = spec.init.0.clone();
        let mut m = RuleModel { spec, state, scheduled: None, sigma: Span::Infinite };
        m.reschedule(None)?;
        Ok(m)
    }

    pub fn spec(&self) -> &AtomicSpec<T> {
        &self.spec
    }

    pub fn state(&self) -> &[Value] {
        &self.state
    }

    fn lookup(&self, path: &[String], msg: Option<&Message<T>>) -> Option<Value> {
        match path {
            [name] => self.spec.space.index_of(name).map(|i| self.state[i].clone()),
            [head, field] if head == "msg" => msg.and_then(|m| m.field(field).cloned()),
            _ => None,
        }
    }

    fn eval(&self, e: &Expr, msg: Option<&Message<T>>, now: Option<T>) -> Result<Value, ModelError> {
        struct E<'a, T: TimeScalar> {
            m: &'a RuleModel<T>,
            msg: Option<&'a Message<T>>,
            now: Option<T>,
        }
        impl<T: TimeScalar> Env for E<'_, T> {
            fn lookup(&self, path: &[String]) -> Option<Value> {
                self.m.lookup(path, self.msg)
            }
            fn time(&self) -> Option<(i64, i64)> {
                self.now.map(|t| t.to_ratio())
            }
        }
        e.eval(&E { m: self, msg, now }).map_err(|err| ModelError(format!("{}: `{e}`: {err}", self.spec.id)))
    }

    fn holds(&self, e: &Option<Expr>, msg: Option<&Message<T>>, now: Option<T>) -> Result<bool, ModelError> {
        match e {
            None => Ok(true),
            Some(e) => match self.eval(e, msg, now)? {
                Value::Bool(b) => Ok(b),
                v => Err(ModelError(format!("{}: guard `{e}` evaluated to {v}", self.spec.id))),
            },
        }
    }

    fn apply(&mut self, set: &Updates, msg: Option<&Message<T>>, now: Option<T>) -> Result<(), ModelError> {
        let mut next = self.state.clone();
        for (name, e) in set {
            let i = self
                .spec
                .space
                .index_of(name)
                .ok_or_else(|| ModelError(format!("{}: unknown variable `{name}`", self.spec.id)))?;
            let v = self.eval(e, msg, now)?;
            if !self.spec.space.vars()[i].domain.contains(&v) {
                return Err(ModelError(format!("{}: value {v} outside the domain of `{name}`", self.spec.id)));
            }
            next[i] = v;
        }
        self.state = next;
        Ok(())
    }

    fn reschedule(&mut self, now: Option<T>) -> Result<(), ModelError> {
        self.scheduled = None;
        for (i, r) in self.spec.internal.iter().enumerate() {
            if self.holds(&r.when, None, now)? {
                self.scheduled = Some(i);
                break;
            }
        }
        self.sigma = self.scheduled.map_or(Span::Infinite, |i| self.spec.internal[i].after);
        Ok(())
    }
}

impl<T: TimeScalar> Atomic<T> for RuleModel<T> {
    fn ta(&self) -> Span<T> {
        self.sigma
    }

    fn delta_int(&mut self, ctx: &mut Ctx<'_, T>) -> Result<(), ModelError> {
        if let Some(i) = self.scheduled {
            let set = self.spec.internal[i].set.clone();
            self.apply(&set, None, Some(ctx.now()))?;
        }
        self.reschedule(Some(ctx.now()))
    }

    /// Messages matching no rule leave the schedule untouched; otherwise the
    /// scheduled rule is re-selected and its delay restarts.
    fn delta_ext(&mut self, ctx: &mut Ctx<'_, T>, elapsed: T, bag: &[Message<T>]) -> Result<(), ModelError> {
        let now = Some(ctx.now());
        let mut reacted = false;
        for msg in bag {
            let mut chosen = None;
            for (i, r) in self.spec.external.iter().enumerate() {
                if r.port == msg.target.port
                    && r.msg_type.as_ref().is_none_or(|t| *t == msg.msg_type)
                    && self.holds(&r.when, Some(msg), now)?
                {
                    chosen = Some(i);
                    break;
                }
            }
            if let Some(i) = chosen {
                let set = self.spec.external[i].set.clone();
                self.apply(&set, Some(msg), now)?;
                reacted = true;
            }
        }
        if reacted {
            self.reschedule(now)
        } else {
            if let Span::Finite(s) = self.sigma {
                self.sigma = Span::Finite(if elapsed > s { T::zero() } else { s - elapsed });
            }
            Ok(())
        }
    }

    fn output(&self, now: T) -> Result<Vec<Output>, ModelError> {
        let Some(i) = self.scheduled else { return Ok(vec![]) };
        let mut out = Vec::new();
        for emit in &self.spec.internal[i].emit {
            let mut fields = super::message::Fields::new();
            for (name, e) in &emit.fields {
                fields.insert(name.clone(), self.eval(e, None, Some(now))?);
            }
            out.push(Output::new(emit.port.clone(), emit.msg_type.clone(), fields));
        }
        Ok(out)
    }

    fn snapshot(&self) -> StateSnapshot {
        self.spec.space.names().map(str::to_string).zip(self.state.iter().cloned()).collect()
    }
}
