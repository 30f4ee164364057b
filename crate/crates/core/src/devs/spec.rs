//! Structural and behavioral model descriptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::message::Endpoint;
use super::model::Atomic;
use super::DevsError;
use crate::expr::Expr;
use crate::process::{Assignment, VariableSpace};
use crate::time::{Span, TimeScalar};
use crate::Time;

/// Simultaneous variable updates, evaluated against the pre-update state.
pub type Updates = Vec<(String, Expr)>;

#[derive(Clone, Debug, PartialEq)]
pub struct Emit {
    pub port: String,
    pub msg_type: String,
    pub fields: Vec<(String, Expr)>,
}

/// A guarded internal event: fires `after` the last transition, emits, then
/// applies `set`. The first rule whose guard holds is the scheduled one.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalRule<T = Time> {
    pub when: Option<Expr>,
    pub after: Span<T>,
    pub emit: Vec<Emit>,
    pub set: Updates,
}

/// Reaction to one input message. `msg.<field>` reads the message.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalRule {
    pub port: String,
    pub msg_type: Option<String>,
    pub when: Option<Expr>,
    pub set: Updates,
}

/// A rule-based atomic model over a variable-assignment state.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicSpec<T = Time> {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub space: VariableSpace,
    pub init: Assignment,
    pub internal: Vec<InternalRule<T>>,
    pub external: Vec<ExternalRule>,
}

pub type Factory<T> = Arc<dyn Fn() -> Box<dyn Atomic<T>> + Send + Sync>;

/// An atomic component whose behavior is supplied as code.
#[derive(Clone)]
pub struct HostedSpec<T = Time> {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Identifies the behavior for equality and display.
    pub label: String,
    pub factory: Factory<T>,
}

impl<T> PartialEq for HostedSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.inputs == other.inputs && self.outputs == other.outputs && self.label == other.label
    }
}

impl<T> fmt::Debug for HostedSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HostedSpec")
            .field("id", &self.id)
            .field("inputs", &self.inputs)
            .field("outputs", &self.outputs)
            .field("label", &self.label)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComponentSpec<T = Time> {
    Atomic(AtomicSpec<T>),
    Coupled(CoupledSpec<T>),
    Hosted(HostedSpec<T>),
}

impl<T> ComponentSpec<T> {
    pub fn id(&self) -> &str {
        match self {
            ComponentSpec::Atomic(a) => &a.id,
            ComponentSpec::Coupled(c) => &c.id,
            ComponentSpec::Hosted(h) => &h.id,
        }
    }

    pub fn inputs(&self) -> &[String] {
        match self {
            ComponentSpec::Atomic(a) => &a.inputs,
            ComponentSpec::Coupled(c) => &c.inputs,
            ComponentSpec::Hosted(h) => &h.inputs,
        }
    }

    pub fn outputs(&self) -> &[String] {
        match self {
            ComponentSpec::Atomic(a) => &a.outputs,
            ComponentSpec::Coupled(c) => &c.outputs,
            ComponentSpec::Hosted(h) => &h.outputs,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, ComponentSpec::Coupled(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CouplingKind {
    Eic,
    Eoc,
    Ic,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Coupling {
    pub from: Endpoint,
    pub to: Endpoint,
}

impl Coupling {
    pub fn new(from: Endpoint, to: Endpoint) -> Self {
        Coupling { from, to }
    }

    /// Kind relative to the coupled model that owns the coupling.
    pub fn kind(&self, owner: &str) -> CouplingKind {
        if self.from.component == owner {
            CouplingKind::Eic
        } else if self.to.component == owner {
            CouplingKind::Eoc
        } else {
            CouplingKind::Ic
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSpec<T = Time> {
    pub id: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub children: Vec<ComponentSpec<T>>,
    pub couplings: Vec<Coupling>,
}

impl<T: TimeScalar> CoupledSpec<T> {
    pub fn new(id: impl Into<String>) -> Self {
        CoupledSpec { id: id.into(), inputs: vec![], outputs: vec![], children: vec![], couplings: vec![] }
    }

    /// Sorts couplings so that equal structures compare equal regardless of
    /// declaration order. Applied recursively.
    pub fn canonicalize(&mut self) {
        self.couplings.sort();
        self.couplings.dedup();
        for c in &mut self.children {
            if let ComponentSpec::Coupled(c) = c {
                c.canonicalize();
            }
        }
    }

    pub fn child(&self, id: &str) -> Option<&ComponentSpec<T>> {
        self.children.iter().find(|c| c.id() == id)
    }

    /// Influencer sets: for each child, the children with an IC into it.
    pub fn influencers(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> =
            self.children.iter().map(|c| (c.id().to_string(), BTreeSet::new())).collect();
        for c in &self.couplings {
            if c.kind(&self.id) == CouplingKind::Ic {
                out.entry(c.to.component.clone()).or_default().insert(c.from.component.clone());
            }
        }
        out
    }

    /// All leaf components at any depth.
    pub fn leaves(&self) -> Vec<&ComponentSpec<T>> {
        let mut out = Vec::new();
        for c in &self.children {
            match c {
                ComponentSpec::Coupled(inner) => out.extend(inner.leaves()),
                leaf => out.push(leaf),
            }
        }
        out
    }

    /// Every component id at any depth, including this one.
    pub fn all_ids(&self) -> Vec<&str> {
        let mut out = vec![self.id.as_str()];
        for c in &self.children {
            match c {
                ComponentSpec::Coupled(inner) => out.extend(inner.all_ids()),
                leaf => out.push(leaf.id()),
            }
        }
        out
    }

    /// Finds a component at any depth.
    pub fn find(&self, id: &str) -> Option<&ComponentSpec<T>> {
        for c in &self.children {
            if c.id() == id {
                return Some(c);
            }
            if let ComponentSpec::Coupled(inner) = c {
                if let Some(found) = inner.find(id) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Checks labels, self-influence and coupling endpoints at every level.
    /// Component ids must be unique across the whole hierarchy so that the
    /// flattened routing table can name leaves directly.
    pub fn validate(&self) -> Result<(), DevsError> {
        let mut seen = BTreeSet::new();
        for id in self.all_ids() {
            if !seen.insert(id) {
                return Err(DevsError::DuplicateLabel(id.to_string()));
            }
        }
        self.validate_level()
    }

    fn validate_level(&self) -> Result<(), DevsError> {
        for (d, infl) in self.influencers() {
            if infl.contains(&d) {
                return Err(DevsError::SelfInfluence(d));
            }
        }
        let dangling = |c: &Coupling, why: &str| DevsError::DanglingCoupling(format!("{c} in `{}`: {why}", self.id));
        for c in &self.couplings {
            if c.from.component == self.id && c.to.component == self.id {
                return Err(dangling(c, "connects the model's own input to its own output"));
            }
            match c.kind(&self.id) {
                CouplingKind::Eic => {
                    if !self.inputs.contains(&c.from.port) {
                        return Err(dangling(c, "unknown input port"));
                    }
                }
                _ => {
                    let src = self.child(&c.from.component).ok_or_else(|| dangling(c, "unknown source component"))?;
                    if !src.outputs().contains(&c.from.port) {
                        return Err(dangling(c, "unknown source port"));
                    }
                }
            }
            match c.kind(&self.id) {
                CouplingKind::Eoc => {
                    if !self.outputs.contains(&c.to.port) {
                        return Err(dangling(c, "unknown output port"));
                    }
                }
                _ => {
                    let dst = self.child(&c.to.component).ok_or_else(|| dangling(c, "unknown target component"))?;
                    if !dst.inputs().contains(&c.to.port) {
                        return Err(dangling(c, "unknown target port"));
                    }
                }
            }
        }
        for c in &self.children {
            if let ComponentSpec::Coupled(inner) = c {
                inner.validate_level()?;
            }
        }
        Ok(())
    }

    fn all_couplings(&self, out: &mut Vec<Coupling>) {
        out.extend(self.couplings.iter().cloned());
        for c in &self.children {
            if let ComponentSpec::Coupled(inner) = c {
                inner.all_couplings(out);
            }
        }
    }

    /// Equivalent one-level model: the same leaves, sorted by id, with every
    /// chain of couplings through intermediate coupled ports collapsed.
    pub fn flatten(&self) -> Result<CoupledSpec<T>, DevsError> {
        self.validate()?;
        let mut all = Vec::new();
        self.all_couplings(&mut all);
        let mut next: BTreeMap<&Endpoint, Vec<&Endpoint>> = BTreeMap::new();
        for c in &all {
            next.entry(&c.from).or_default().push(&c.to);
        }
        let leaves = self.leaves();
        let leaf_ids: BTreeSet<&str> = leaves.iter().map(|l| l.id()).collect();
        let is_sink = |e: &Endpoint| leaf_ids.contains(e.component.as_str()) || e.component == self.id;

        let mut sources: Vec<Endpoint> =
            self.inputs.iter().map(|p| Endpoint::new(self.id.clone(), p.clone())).collect();
        for l in &leaves {
            sources.extend(l.outputs().iter().map(|p| Endpoint::new(l.id(), p.clone())));
        }
        let mut couplings = BTreeSet::new();
        for src in sources {
            let mut stack: Vec<&Endpoint> = next.get(&src).cloned().unwrap_or_default();
            let mut visited = BTreeSet::new();
            while let Some(e) = stack.pop() {
                if !visited.insert(e) {
                    continue;
                }
                if is_sink(e) {
                    couplings.insert(Coupling::new(src.clone(), e.clone()));
                } else if let Some(more) = next.get(e) {
                    stack.extend(more.iter().copied());
                }
            }
        }
        let mut children: Vec<ComponentSpec<T>> = leaves.into_iter().cloned().collect();
        children.sort_by(|a, b| a.id().cmp(b.id()));
        Ok(CoupledSpec {
            id: self.id.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            children,
            couplings: couplings.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Variable;

    pub(crate) fn leaf(id: &str, ins: &[&str], outs: &[&str]) -> ComponentSpec<i64> {
        ComponentSpec::Atomic(AtomicSpec {
            id: id.into(),
            inputs: ins.iter().map(|s| s.to_string()).collect(),
            outputs: outs.iter().map(|s| s.to_string()).collect(),
            space: VariableSpace::new(vec![Variable::new("n", crate::value::int_range(0, 3))]).unwrap(),
            init: Assignment(vec![0.into()]),
            internal: vec![],
            external: vec![],
        })
    }

    fn ep(s: &str) -> Endpoint {
        Endpoint::parse(s).unwrap()
    }

    #[test]
    fn flatten_collapses_nested_ports() {
        let inner = CoupledSpec {
            id: "Car".into(),
            inputs: vec!["cmd".into()],
            outputs: vec!["status".into()],
            children: vec![leaf("Ctrl", &["in"], &["out"])],
            couplings: vec![
                Coupling::new(ep("Car.cmd"), ep("Ctrl.in")),
                Coupling::new(ep("Ctrl.out"), ep("Car.status")),
            ],
        };
        let root = CoupledSpec {
            id: "Sys".into(),
            inputs: vec!["go".into()],
            outputs: vec![],
            children: vec![leaf("Boss", &["in"], &["out"]), ComponentSpec::Coupled(inner)],
            couplings: vec![
                Coupling::new(ep("Sys.go"), ep("Boss.in")),
                Coupling::new(ep("Boss.out"), ep("Car.cmd")),
                Coupling::new(ep("Car.status"), ep("Boss.in")),
            ],
        };
        let flat = root.flatten().unwrap();
        let ids: Vec<_> = flat.children.iter().map(|c| c.id()).collect();
        assert_eq!(ids, ["Boss", "Ctrl"]);
        assert_eq!(
            flat.couplings,
            vec![
                Coupling::new(ep("Boss.out"), ep("Ctrl.in")),
                Coupling::new(ep("Ctrl.out"), ep("Boss.in")),
                Coupling::new(ep("Sys.go"), ep("Boss.in")),
            ]
        );
    }

    #[test]
    fn structural_errors() {
        let mut root = CoupledSpec::new("Sys");
        root.children = vec![leaf("A", &["in"], &["out"]), leaf("A", &["in"], &["out"])];
        assert_eq!(root.validate(), Err(DevsError::DuplicateLabel("A".into())));

        root.children.pop();
        root.couplings = vec![Coupling::new(ep("A.out"), ep("A.in"))];
        assert_eq!(root.validate(), Err(DevsError::SelfInfluence("A".into())));

        root.couplings = vec![Coupling::new(ep("A.out"), ep("B.in"))];
        assert!(matches!(root.validate(), Err(DevsError::DanglingCoupling(_))));
        root.couplings = vec![Coupling::new(ep("Sys.nope"), ep("A.in"))];
        assert!(matches!(root.validate(), Err(DevsError::DanglingCoupling(_))));
    }

    #[test]
    fn empty_coupled_is_valid() {
        let root: CoupledSpec<i64> = CoupledSpec::new("Empty");
        assert_eq!(root.validate(), Ok(()));
        assert!(root.flatten().unwrap().children.is_empty());
    }
}
