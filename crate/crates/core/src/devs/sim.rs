//! The abstract simulator over a flattened coupled model.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::message::{Endpoint, Message, Output};
use super::model::{Atomic, Ctx, RuleModel};
use super::spec::{ComponentSpec, CoupledSpec, CouplingKind};
use super::trace::{Detail, EventKind, MessageRecord, StateSnapshot, TraceEvent};
use super::DevsError;
use crate::time::{Span, TimeScalar};
use crate::Time;

pub const DEFAULT_ZERO_DELAY_BOUND: usize = 10_000;

struct Inner<T> {
    spec: CoupledSpec<T>,
    /// Leaf output port to leaf input ports and root output ports.
    routes: BTreeMap<Endpoint, Vec<Endpoint>>,
    /// Root input port to leaf input ports.
    root_in: BTreeMap<String, Vec<Endpoint>>,
}

/// An executable system: a flattened spec with its routing table.
#[derive(Clone)]
pub struct System<T = Time> {
    inner: Arc<Inner<T>>,
}

pub fn build_coupled<T: TimeScalar>(spec: &CoupledSpec<T>) -> Result<System<T>, DevsError> {
    let spec = spec.flatten()?;
    let mut routes: BTreeMap<Endpoint, Vec<Endpoint>> = BTreeMap::new();
    let mut root_in: BTreeMap<String, Vec<Endpoint>> = BTreeMap::new();
    for c in &spec.couplings {
        match c.kind(&spec.id) {
            CouplingKind::Eic => root_in.entry(c.from.port.clone()).or_default().push(c.to.clone()),
            _ => routes.entry(c.from.clone()).or_default().push(c.to.clone()),
        }
    }
    Ok(System { inner: Arc::new(Inner { spec, routes, root_in }) })
}

impl<T: TimeScalar> System<T> {
    /// The flattened spec.
    pub fn spec(&self) -> &CoupledSpec<T> {
        &self.inner.spec
    }

    pub fn leaf_ids(&self) -> impl Iterator<Item = &str> {
        self.inner.spec.children.iter().map(|c| c.id())
    }

    pub fn routes(&self) -> &BTreeMap<Endpoint, Vec<Endpoint>> {
        &self.inner.routes
    }
}

struct Leaf<T> {
    id: String,
    relay: bool,
    model: Box<dyn Atomic<T>>,
    t_last: T,
    t_next: Option<T>,
}

/// One run of a [`System`].
pub struct Simulation<T = Time> {
    system: System<T>,
    leaves: Vec<Leaf<T>>,
    now: T,
    next_id: u64,
    inbox: BTreeMap<(T, u64), Message<T>>,
    inbox_seq: u64,
    trace: Vec<TraceEvent<T>>,
    zero_bound: usize,
}

fn schedule<T: TimeScalar>(id: &str, ta: Span<T>, now: T) -> Result<Option<T>, DevsError> {
    if let Span::Finite(d) = ta {
        if d < T::zero() {
            return Err(DevsError::NegativeTimeAdvance { component: id.to_string() });
        }
    }
    Ok(ta.after(now))
}

impl<T: TimeScalar> Simulation<T> {
    pub fn new(system: &System<T>) -> Result<Self, DevsError> {
        let mut leaves = Vec::new();
        for c in &system.spec().children {
            let model: Box<dyn Atomic<T>> = match c {
                ComponentSpec::Atomic(a) => Box::new(RuleModel::new(a.clone())?),
                ComponentSpec::Hosted(h) => (h.factory)(),
                ComponentSpec::Coupled(_) => unreachable!("flattened spec has only leaves"),
            };
            let t_next = schedule(c.id(), model.ta(), T::zero())?;
            leaves.push(Leaf { id: c.id().to_string(), relay: model.is_relay(), model, t_last: T::zero(), t_next });
        }
        Ok(Simulation {
            system: system.clone(),
            leaves,
            now: T::zero(),
            next_id: 0,
            inbox: BTreeMap::new(),
            inbox_seq: 0,
            trace: Vec::new(),
            zero_bound: DEFAULT_ZERO_DELAY_BOUND,
        })
    }

    pub fn with_zero_delay_bound(mut self, bound: usize) -> Self {
        self.zero_bound = bound;
        self
    }

    pub fn now(&self) -> T {
        self.now
    }

    pub fn trace(&self) -> &[TraceEvent<T>] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceEvent<T>> {
        self.trace
    }

    pub fn snapshot(&self, id: &str) -> Option<StateSnapshot> {
        self.leaves.iter().find(|l| l.id == id).map(|l| l.model.snapshot())
    }

    pub fn snapshots(&self) -> BTreeMap<String, StateSnapshot> {
        self.leaves.iter().map(|l| (l.id.clone(), l.model.snapshot())).collect()
    }

    /// Injected messages not yet delivered.
    pub fn pending(&self) -> impl Iterator<Item = &Message<T>> {
        self.inbox.values()
    }

    /// Queues a stimulus for a root input port, or for a leaf input port
    /// that a root input couples into.
    pub fn inject_external(&mut self, msg: Message<T>) -> Result<(), DevsError> {
        let inner = &self.system.inner;
        let ok = if msg.target.component == inner.spec.id {
            inner.root_in.contains_key(&msg.target.port)
        } else {
            inner.root_in.values().any(|v| v.contains(&msg.target))
        };
        if !ok {
            return Err(DevsError::UnknownPort(msg.target.to_string()));
        }
        if msg.delivery_time < msg.send_time {
            return Err(DevsError::InvalidMessage(format!("message to {} delivered before it is sent", msg.target)));
        }
        if msg.delivery_time < self.now {
            return Err(DevsError::TimeInPast { at: msg.delivery_time.to_string(), now: self.now.to_string() });
        }
        self.inbox.insert((msg.delivery_time, self.inbox_seq), msg);
        self.inbox_seq += 1;
        Ok(())
    }

    fn next_time(&self) -> Option<T> {
        let leaf = self.leaves.iter().filter_map(|l| l.t_next).min();
        let ext = self.inbox.keys().next().map(|(t, _)| *t);
        match (leaf, ext) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Processes every instant up to and including `until`.
    pub fn run_until(&mut self, until: T) -> Result<(), DevsError> {
        while let Some(t) = self.next_time() {
            if t > until {
                break;
            }
            self.instant(t)?;
        }
        if until > self.now {
            self.now = until;
        }
        Ok(())
    }

    fn push(&mut self, kind: EventKind, subject: &str, detail: Detail) {
        let seq = self.trace.len() as u64;
        self.trace.push(TraceEvent { seq, time: self.now, kind, subject: subject.to_string(), detail });
    }

    fn msg_detail(m: &Message<T>) -> Detail {
        Detail { message: Some(MessageRecord::from(m)), ..Detail::default() }
    }

    fn instant(&mut self, t: T) -> Result<(), DevsError> {
        self.now = t;
        let mut steps = 0;
        loop {
            let imminent: Vec<usize> = (0..self.leaves.len()).filter(|&i| self.leaves[i].t_next == Some(t)).collect();
            let has_ext = self.inbox.keys().next().is_some_and(|(u, _)| *u == t);
            if imminent.is_empty() && !has_ext {
                return Ok(());
            }
            steps += 1;
            if steps > self.zero_bound {
                return Err(DevsError::NonterminatingZeroDelay { time: t.to_string(), bound: self.zero_bound });
            }
            self.micro_step(t, &imminent)?;
        }
    }

    fn leaf_index(&self, id: &str) -> Option<usize> {
        self.leaves.binary_search_by(|l| l.id.as_str().cmp(id)).ok()
    }

    /// Routes one leaf's outputs into `bags`; outputs to the root are
    /// delivered on the spot.
    fn route(&mut self, t: T, i: usize, outs: Vec<Output>, bags: &mut BTreeMap<usize, Vec<Message<T>>>) {
        let id = self.leaves[i].id.clone();
        let root = self.system.inner.spec.id.clone();
        for out in outs {
            let physical = Endpoint::new(id.clone(), out.port.clone());
            let source = out.origin.clone().unwrap_or_else(|| physical.clone());
            let dests = self.system.inner.routes.get(&physical).cloned().unwrap_or_default();
            let mut reserved = out.id;
            for dest in dests {
                let mid = reserved.take().unwrap_or_else(|| {
                    let n = self.next_id;
                    self.next_id += 1;
                    n
                });
                let m = Message {
                    id: mid,
                    msg_type: out.msg_type.clone(),
                    source: source.clone(),
                    target: dest,
                    fields: out.fields.clone(),
                    send_time: t,
                    delivery_time: t,
                };
                self.push(EventKind::MessageSent, &id, Self::msg_detail(&m));
                if m.target.component == root {
                    self.push(EventKind::MessageDelivered, &root, Self::msg_detail(&m));
                } else {
                    let j = self.leaf_index(&m.target.component).expect("routes end at leaves");
                    bags.entry(j).or_default().push(m);
                }
            }
        }
    }

    /// Delivers a bag and runs whichever transition applies.
    fn transition(&mut self, t: T, i: usize, mut bag: Vec<Message<T>>) -> Result<(), DevsError> {
        bag.sort_by(|a, b| (&a.source.component, &a.source.port).cmp(&(&b.source.component, &b.source.port)));
        let id = self.leaves[i].id.clone();
        for m in &bag {
            self.push(EventKind::MessageDelivered, &id, Self::msg_detail(m));
        }
        let old = self.leaves[i].model.snapshot();
        let mut notes = Vec::new();
        let is_imminent = self.leaves[i].t_next == Some(t);
        let elapsed = t - self.leaves[i].t_last;
        let kind = {
            let leaf = &mut self.leaves[i];
            let mut ctx = Ctx::new(t, &mut self.next_id, &mut notes);
            match (is_imminent, bag.is_empty()) {
                (true, true) => {
                    leaf.model.delta_int(&mut ctx)?;
                    EventKind::InternalTransition
                }
                (true, false) => {
                    leaf.model.delta_con(&mut ctx, &bag)?;
                    EventKind::ConfluentTransition
                }
                _ => {
                    leaf.model.delta_ext(&mut ctx, elapsed, &bag)?;
                    EventKind::ExternalTransition
                }
            }
        };
        let mut detail = Detail::default();
        if !bag.is_empty() {
            detail.bag = Some(bag.iter().map(|m| m.id).collect());
        }
        if kind == EventKind::ExternalTransition {
            detail.elapsed = Some(elapsed.to_ratio());
        }
        self.push(kind, &id, detail);
        for n in notes {
            self.push(n.kind, &id, n.detail);
        }
        let new = self.leaves[i].model.snapshot();
        if new != old {
            self.push(EventKind::StateChange, &id, Detail { old: Some(old), new: Some(new), ..Detail::default() });
        }
        let leaf = &mut self.leaves[i];
        leaf.t_last = t;
        leaf.t_next = schedule(&leaf.id, leaf.model.ta(), t)?;
        Ok(())
    }

    fn micro_step(&mut self, t: T, imminent: &[usize]) -> Result<(), DevsError> {
        let mut bags: BTreeMap<usize, Vec<Message<T>>> = BTreeMap::new();
        let root = self.system.inner.spec.id.clone();
        for leaf in self.leaves.iter_mut().filter(|l| l.relay) {
            leaf.model.begin_micro_step();
        }

        // external stimuli due now
        let due: Vec<(T, u64)> = self.inbox.range((t, 0)..=(t, u64::MAX)).map(|(k, _)| *k).collect();
        for key in due {
            let msg = self.inbox.remove(&key).expect("key listed above");
            let targets = if msg.target.component == root {
                self.system.inner.root_in[&msg.target.port].clone()
            } else {
                vec![msg.target.clone()]
            };
            for target in targets {
                let mut m = msg.clone();
                m.id = self.next_id;
                self.next_id += 1;
                m.target = target;
                self.push(EventKind::MessageSent, &msg.source.component.clone(), Self::msg_detail(&m));
                let i = self.leaf_index(&m.target.component).expect("routes end at leaves");
                bags.entry(i).or_default().push(m);
            }
        }

        // outputs of imminent components, routed through the couplings
        for &i in imminent {
            let outs = self.leaves[i].model.output(t)?;
            self.route(t, i, outs, &mut bags);
        }

        // relays react within this micro-step, so their zero-delay
        // forwarding lands in the same bags as direct traffic would
        let mut emitted: BTreeSet<usize> = imminent.iter().copied().filter(|&i| self.leaves[i].relay).collect();
        // a relay that has emitted and then transitioned without input is
        // settled; whatever it still holds waits for the next micro-step
        let mut settled: BTreeSet<usize> = BTreeSet::new();
        let mut hops = 0;
        loop {
            let next = (0..self.leaves.len()).find(|&i| {
                self.leaves[i].relay
                    && (bags.contains_key(&i) || (self.leaves[i].t_next == Some(t) && !settled.contains(&i)))
            });
            let Some(r) = next else { break };
            hops += 1;
            if hops > self.zero_bound {
                return Err(DevsError::NonterminatingZeroDelay { time: t.to_string(), bound: self.zero_bound });
            }
            if self.leaves[r].t_next == Some(t) && !emitted.contains(&r) {
                let outs = self.leaves[r].model.output(t)?;
                self.route(t, r, outs, &mut bags);
                emitted.insert(r);
                continue;
            }
            let bag = bags.remove(&r).unwrap_or_default();
            if bag.is_empty() {
                settled.insert(r);
            } else {
                settled.remove(&r);
            }
            self.transition(t, r, bag)?;
            emitted.remove(&r);
        }

        let mut active: Vec<usize> = imminent.iter().copied().filter(|&i| !self.leaves[i].relay).collect();
        active.extend(bags.keys().copied());
        active.sort_unstable();
        active.dedup();
        for i in active {
            let bag = bags.remove(&i).unwrap_or_default();
            self.transition(t, i, bag)?;
        }
        Ok(())
    }
}

/// Runs a fresh simulation. Inputs are delivered in time order; ties keep
/// their given order.
pub fn run<T: TimeScalar>(
    system: &System<T>,
    until: T,
    inputs: Vec<Message<T>>,
) -> Result<Vec<TraceEvent<T>>, DevsError> {
    let mut inputs = inputs;
    inputs.sort_by_key(|a| a.delivery_time);
    let mut sim = Simulation::new(system)?;
    for m in inputs {
        sim.inject_external(m)?;
    }
    sim.run_until(until)?;
    Ok(sim.into_trace())
}
