//! Reference scenarios: the five-floor elevator with its H5 attack and the
//! ATM with card trapping, cash trapping and jackpotting. Scenarios are
//! loaded from TOML files or built in code; both describe the same values.

use std::collections::{BTreeMap, BTreeSet};

use crate::attack::{insert_attack_simulator, AttackError};
use crate::devs::{build_coupled, run, ComponentSpec, CoupledSpec, DevsError, EventKind, Message, TraceEvent};
use crate::effects::{Catalog, EffectProgram};
use crate::expr::{Env, Expr};
use crate::process::{Assignment, Connection, ProcessModel, SafetyProperty};
use crate::value::Value;
use crate::Time;

mod atm;
mod elevator;
mod file;
mod monitor;

pub use atm::atm_baseline;
pub use elevator::{car_controller_connection, elevator_baseline, elevator_case, ELEVATOR_FLOORS};
pub use file::{load_scenario, load_scenario_str};
pub use monitor::{monitor_trace, GroundSample, Monitored, SafetyViolation, TimedFinding, Unmodeled};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{location}: {message}")]
    Validation { location: String, message: String },
}

impl ScenarioError {
    pub(crate) fn at(location: impl Into<String>, message: impl ToString) -> Self {
        ScenarioError::Validation { location: location.into(), message: message.to_string() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Devs(#[from] DevsError),
}

/// Message type declarations: type -> field -> domain.
pub type MessageTypes = BTreeMap<String, BTreeMap<String, Vec<Value>>>;

/// A connection plus the recipe for reading its ground variables off a
/// running system: one expression per ground variable, in the ground
/// model's variable order, over `Component.variable` names.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub connection: Connection,
    pub bindings: Vec<(String, Expr)>,
}

impl Probe {
    /// Evaluates the bindings against component states.
    pub fn sample(&self, states: &BTreeMap<String, BTreeMap<String, Value>>) -> Result<Assignment, String> {
        struct Snap<'a>(&'a BTreeMap<String, BTreeMap<String, Value>>);
        impl Env for Snap<'_> {
            fn lookup(&self, path: &[String]) -> Option<Value> {
                match path {
                    [c, v] => self.0.get(c)?.get(v).cloned(),
                    _ => None,
                }
            }
        }
        let mut values = Vec::new();
        for (var, e) in &self.bindings {
            values.push(e.eval(&Snap(states)).map_err(|err| format!("binding `{var}`: {err}"))?);
        }
        let p = Assignment(values);
        self.connection.ground().space().check(&p).map_err(|e| e.to_string())?;
        Ok(p)
    }
}

/// A safety property over one component's ground variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSafety {
    pub component: String,
    pub property: SafetyProperty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub system: CoupledSpec,
    pub message_types: MessageTypes,
    pub drivers: Vec<Message>,
    pub known_models: BTreeMap<String, ProcessModel>,
    pub ground_models: BTreeMap<String, ProcessModel>,
    pub connections: BTreeMap<String, Probe>,
    pub safety: Vec<ScenarioSafety>,
    pub scripts: BTreeMap<String, EffectProgram>,
    /// Components intercepted when an effect script is attached.
    pub targets: BTreeSet<String>,
}

fn sort_children(spec: &mut CoupledSpec) {
    spec.children.sort_by(|a, b| a.id().cmp(b.id()));
    for c in &mut spec.children {
        if let ComponentSpec::Coupled(inner) = c {
            sort_children(inner);
        }
    }
}

impl Scenario {
    /// Puts children and couplings in a fixed order so that scenarios built
    /// different ways compare equal.
    pub fn normalize(&mut self) {
        sort_children(&mut self.system);
        self.system.canonicalize();
        self.drivers.sort_by_key(|a| a.delivery_time);
    }

    /// Names the effect validator may refer to: every leaf with its state
    /// variables, and the declared message types.
    pub fn catalog(&self) -> Catalog {
        let mut components = BTreeMap::new();
        for leaf in self.system.leaves() {
            let vars = match leaf {
                ComponentSpec::Atomic(a) => a.space.names().map(str::to_string).collect(),
                _ => vec![],
            };
            components.insert(leaf.id().to_string(), vars);
        }
        Catalog { components, messages: self.message_types.clone() }
    }

    /// Replaces the initial value of one variable of one atomic component.
    pub fn set_initial(&mut self, component: &str, var: &str, value: Value) -> Result<(), ScenarioError> {
        let loc = format!("system.atomic[{component}]");
        let atomic = find_atomic_mut(&mut self.system, component)
            .ok_or_else(|| ScenarioError::at(&loc, "no such atomic component"))?;
        let i = atomic.space.index_of(var).ok_or_else(|| ScenarioError::at(&loc, format!("no variable `{var}`")))?;
        if !atomic.space.vars()[i].domain.contains(&value) {
            return Err(ScenarioError::at(&loc, format!("{value} is outside the domain of `{var}`")));
        }
        atomic.init.0[i] = value;
        Ok(())
    }

    /// Intercepted components: the declared targets, or every leaf when the
    /// scenario declares none.
    pub fn attack_targets(&self) -> BTreeSet<String> {
        if self.targets.is_empty() {
            self.system.leaves().iter().map(|l| l.id().to_string()).collect()
        } else {
            self.targets.clone()
        }
    }

    /// Runs the drivers up to `until`, with the attack simulator inserted
    /// when a program is given.
    pub fn run(&self, program: Option<&EffectProgram>, until: Time) -> Result<Vec<TraceEvent>, RunError> {
        let system = match program {
            Some(p) => build_coupled(&insert_attack_simulator(&self.system, &self.attack_targets(), p)?.0)?,
            None => build_coupled(&self.system)?,
        };
        Ok(run(&system, until, self.drivers.clone())?)
    }

    /// Component states at the end of a trace of this scenario.
    pub fn final_states(&self, trace: &[TraceEvent]) -> BTreeMap<String, BTreeMap<String, Value>> {
        let mut states = self.initial_states();
        for ev in trace.iter().filter(|e| e.kind == EventKind::StateChange) {
            if let (Some(slot), Some(new)) = (states.get_mut(&ev.subject), &ev.detail.new) {
                *slot = new.clone();
            }
        }
        states
    }

    /// Initial state of every atomic leaf, by variable name.
    pub fn initial_states(&self) -> BTreeMap<String, BTreeMap<String, Value>> {
        let mut out = BTreeMap::new();
        for leaf in self.system.leaves() {
            if let ComponentSpec::Atomic(a) = leaf {
                let s = a.space.names().map(str::to_string).zip(a.init.values().iter().cloned()).collect();
                out.insert(a.id.clone(), s);
            }
        }
        out
    }
}

fn find_atomic_mut<'a>(spec: &'a mut CoupledSpec, id: &str) -> Option<&'a mut crate::devs::AtomicSpec> {
    for c in &mut spec.children {
        match c {
            ComponentSpec::Atomic(a) if a.id == id => return Some(a),
            ComponentSpec::Coupled(inner) => {
                if let Some(a) = find_atomic_mut(inner, id) {
                    return Some(a);
                }
            }
            _ => {}
        }
    }
    None
}
