use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::insert::InterceptPlan;
use crate::devs::{Atomic, Ctx, Detail, Endpoint, EventKind, Fields, Message, ModelError, Output, StateSnapshot};
use crate::effects::{EffectProgram, Operator, Pattern, RuleKind};
use crate::expr::{Env, Expr};
use crate::time::{Span, TimeScalar};
use crate::value::Value;

/// What happens to the intercepted message after all matching effects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate<T> {
    Forward,
    Delay(T),
    Drop,
}

struct Pending<T> {
    at: T,
    out: Output,
    held: bool,
}

/// Accumulated result of applying one effect (or chain member) to a message.
struct Applied<T> {
    outputs: Vec<u64>,
    dropped: bool,
    delay: Option<T>,
}

struct MsgEnv<'a, T> {
    msg: &'a Message<T>,
    store: &'a BTreeMap<(String, String), Value>,
    now: T,
}

impl<T: TimeScalar> Env for MsgEnv<'_, T> {
    fn lookup(&self, path: &[String]) -> Option<Value> {
        match path {
            [f] => self.msg.field(f).cloned(),
            [a, b] => self.store.get(&(a.clone(), b.clone())).cloned(),
            _ => None,
        }
    }

    fn time(&self) -> Option<(i64, i64)> {
        Some(self.now.to_ratio())
    }
}

struct StoreEnv<'a, T> {
    store: &'a BTreeMap<(String, String), Value>,
    now: T,
}

impl<T: TimeScalar> Env for StoreEnv<'_, T> {
    fn lookup(&self, path: &[String]) -> Option<Value> {
        match path {
            [a, b] => self.store.get(&(a.clone(), b.clone())).cloned(),
            _ => None,
        }
    }

    fn time(&self) -> Option<(i64, i64)> {
        Some(self.now.to_ratio())
    }
}

fn truthy(e: &Expr, env: &dyn Env) -> bool {
    // evaluation problems read as "does not hold"
    e.eval_bool(env).unwrap_or(false)
}

/// The man-in-the-middle component. Receives every intercepted message,
/// updates its observation store, evaluates activation rules and applies
/// the active effects. Work is released with zero delay unless an effect
/// delays it.
pub struct Interceptor<T> {
    plan: Arc<InterceptPlan>,
    program: Arc<EffectProgram>,
    inbound: BTreeMap<String, Vec<Endpoint>>,
    outbound: BTreeMap<Endpoint, String>,
    active: BTreeSet<String>,
    store: BTreeMap<(String, String), Value>,
    counts: BTreeMap<String, u64>,
    /// Outputs waiting for their release time, in insertion order. Held
    /// entries are generated messages that go out in the next micro-step,
    /// after the receiver has reacted to whatever provoked them.
    pending: Vec<Pending<T>>,
    now: T,
}

impl<T: TimeScalar> Interceptor<T> {
    pub fn new(plan: Arc<InterceptPlan>, program: Arc<EffectProgram>) -> Self {
        let counts = program.effects.iter().map(|e| (e.name.clone(), 0)).collect();
        Interceptor {
            inbound: plan.inbound(),
            outbound: plan.outbound(),
            plan,
            program,
            active: BTreeSet::new(),
            store: BTreeMap::new(),
            counts,
            pending: Vec::new(),
            now: T::zero(),
        }
    }

    pub fn active(&self) -> &BTreeSet<String> {
        &self.active
    }

    pub fn application_count(&self, effect: &str) -> Option<u64> {
        self.counts.get(effect).copied()
    }

    pub fn pending(&self) -> impl Iterator<Item = (T, &Output)> {
        self.pending.iter().map(|p| (p.at, &p.out))
    }

    fn matches(&self, p: &Pattern, msg: &Message<T>, dest: &Endpoint, now: T) -> bool {
        p.msg_type == msg.msg_type
            && p.from == msg.source.component
            && p.to == dest.component
            && p.filter.as_ref().is_none_or(|e| truthy(e, &MsgEnv { msg, store: &self.store, now }))
    }

    fn observe(&mut self, msg: &Message<T>) {
        for (f, v) in &msg.fields {
            self.store.insert((msg.msg_type.clone(), f.clone()), v.clone());
            self.store.insert((msg.source.component.clone(), f.clone()), v.clone());
        }
    }

    fn enqueue(&mut self, at: T, out: Output, held: bool) {
        self.pending.push(Pending { at, out, held });
    }

    fn apply_op(
        &mut self,
        ctx: &mut Ctx<'_, T>,
        op: &Operator,
        msg: &Message<T>,
        dest: &Endpoint,
        acc: &mut Applied<T>,
    ) {
        let now = ctx.now();
        match op {
            Operator::Generate(g) => {
                let route = self.plan.route(&g.from, &g.to).expect("routes checked at insertion").clone();
                let fields: Fields = g.set.iter().map(|(f, v, _)| (f.clone(), v.to_value())).collect();
                let id = ctx.reserve_id();
                let out = Output {
                    port: self.outbound[&route.to].clone(),
                    msg_type: g.msg_type.clone(),
                    fields,
                    origin: Some(route.from.clone()),
                    id: Some(id),
                };
                self.enqueue(now, out, true);
                acc.outputs.push(id);
            }
            Operator::Delay { ticks: None, .. } => acc.dropped = true,
            Operator::Delay { ticks: Some(n), .. } => {
                acc.delay = Some(now + T::from_u64(*n).expect("tick count representable"));
            }
            Operator::Modify(set) => {
                acc.dropped = true;
                let mut fields = msg.fields.clone();
                for (f, v, _) in set {
                    fields.insert(f.clone(), v.to_value());
                }
                let id = ctx.reserve_id();
                let out = Output {
                    port: self.outbound[dest].clone(),
                    msg_type: msg.msg_type.clone(),
                    fields,
                    origin: Some(msg.source.clone()),
                    id: Some(id),
                };
                self.enqueue(now, out, false);
                acc.outputs.push(id);
            }
            Operator::Chain(members) => {
                let program = self.program.clone();
                for (m, _) in members {
                    let def = program.effect(m).expect("chain members are defined");
                    self.apply_op(ctx, &def.op, msg, dest, acc);
                }
            }
        }
    }

    /// Handles one logical message: `msg` on its way to `dest`.
    fn on_message(&mut self, ctx: &mut Ctx<'_, T>, msg: &Message<T>, dest: &Endpoint) {
        let now = ctx.now();
        self.observe(msg);

        let program = self.program.clone();
        for r in &program.rules {
            if !self.matches(&r.trigger, msg, dest, now) {
                continue;
            }
            if let Some(g) = &r.given {
                if !truthy(g, &StoreEnv { store: &self.store, now }) {
                    continue;
                }
            }
            let (changed, kind) = match r.kind {
                RuleKind::Activate => (self.active.insert(r.effect.clone()), EventKind::EffectActivated),
                RuleKind::Deactivate => (self.active.remove(&r.effect), EventKind::EffectDeactivated),
            };
            if changed {
                ctx.record(kind, Detail { effect: Some(r.effect.clone()), trigger: Some(msg.id), ..Detail::default() });
            }
        }

        let fwd_id = ctx.reserve_id();
        let mut fate = Fate::Forward;
        let mut notes: Vec<(String, &'static str, Applied<T>)> = Vec::new();
        for e in &program.effects {
            if !self.active.contains(&e.name) {
                continue;
            }
            let Some(trigger) = program.trigger_of(&e.name) else { continue };
            if !self.matches(trigger, msg, dest, now) {
                continue;
            }
            let mut acc = Applied { outputs: Vec::new(), dropped: false, delay: None };
            self.apply_op(ctx, &e.op, msg, dest, &mut acc);
            if acc.dropped {
                fate = Fate::Drop;
            } else if let (Some(t), false) = (acc.delay, fate == Fate::Drop) {
                fate = Fate::Delay(t);
            }
            *self.counts.entry(e.name.clone()).or_default() += 1;
            notes.push((e.name.clone(), e.op.name(), acc));
        }

        let release = match fate {
            Fate::Forward => Some(now),
            Fate::Delay(t) => Some(t),
            Fate::Drop => None,
        };
        if let Some(at) = release {
            let out = Output {
                port: self.outbound[dest].clone(),
                msg_type: msg.msg_type.clone(),
                fields: msg.fields.clone(),
                origin: Some(msg.source.clone()),
                id: Some(fwd_id),
            };
            self.enqueue(at, out, false);
        }
        // the last effect that delayed owns the delayed copy
        let delayed_by = match fate {
            Fate::Delay(_) => notes.iter().rposition(|(_, _, a)| a.delay.is_some() && !a.dropped),
            _ => None,
        };
        for (i, (effect, operator, acc)) in notes.into_iter().enumerate() {
            let mut outputs = acc.outputs;
            if Some(i) == delayed_by {
                outputs.push(fwd_id);
            }
            ctx.record(
                EventKind::EffectApplied,
                Detail {
                    effect: Some(effect),
                    operator: Some(operator.to_string()),
                    trigger: Some(msg.id),
                    outputs: Some(outputs),
                    drops: Some(if acc.dropped { vec![msg.id] } else { vec![] }),
                    ..Detail::default()
                },
            );
        }
    }
}

impl<T: TimeScalar> Atomic<T> for Interceptor<T> {
    fn ta(&self) -> Span<T> {
        match self.pending.iter().map(|p| p.at).min() {
            Some(t) if t > self.now => Span::Finite(t - self.now),
            Some(_) => Span::zero(),
            None => Span::Infinite,
        }
    }

    fn delta_int(&mut self, ctx: &mut Ctx<'_, T>) -> Result<(), ModelError> {
        let now = ctx.now();
        self.now = now;
        self.pending.retain(|p| p.at > now || p.held);
        Ok(())
    }

    fn delta_ext(&mut self, ctx: &mut Ctx<'_, T>, _elapsed: T, bag: &[Message<T>]) -> Result<(), ModelError> {
        self.now = ctx.now();
        for msg in bag {
            let dests = self
                .inbound
                .get(&msg.target.port)
                .cloned()
                .ok_or_else(|| ModelError(format!("attack simulator has no input `{}`", msg.target.port)))?;
            for dest in &dests {
                self.on_message(ctx, msg, dest);
            }
        }
        Ok(())
    }

    fn output(&self, now: T) -> Result<Vec<Output>, ModelError> {
        Ok(self.pending.iter().filter(|p| p.at <= now && !p.held).map(|p| p.out.clone()).collect())
    }

    fn is_relay(&self) -> bool {
        true
    }

    fn begin_micro_step(&mut self) {
        for p in &mut self.pending {
            p.held = false;
        }
    }

    fn snapshot(&self) -> StateSnapshot {
        let mut s = StateSnapshot::new();
        for (name, n) in &self.counts {
            s.insert(format!("active.{name}"), Value::Bool(self.active.contains(name)));
            s.insert(format!("applied.{name}"), Value::Int(*n as i64));
        }
        s.insert("pending".into(), Value::Int(self.pending.len() as i64));
        s
    }
}
