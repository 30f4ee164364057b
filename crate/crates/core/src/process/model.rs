use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::space::{Assignment, VariableSpace};
use super::PmError;
use crate::value::Value;

pub type StateName = String;

/// An ordered state pair.
pub type Transition = (StateName, StateName);

pub fn transition(a: &str, b: &str) -> Transition {
    (a.to_string(), b.to_string())
}

/// Result of applying a partial observation function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observation {
    Observed(StateName),
    Unobservable,
}

impl Observation {
    pub fn state(&self) -> Option<&str> {
        match self {
            Observation::Observed(s) => Some(s),
            Observation::Unobservable => None,
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Observed(s) => write!(f, "Observed({s})"),
            Observation::Unobservable => f.write_str("Unobservable"),
        }
    }
}

/// A row of an observation table: a pattern (`None` = `*`) and its state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub pattern: Vec<Option<Value>>,
    pub state: StateName,
}

impl Row {
    pub fn new(pattern: Vec<Option<Value>>, state: impl Into<StateName>) -> Self {
        Row { pattern, state: state.into() }
    }

    pub fn matches(&self, p: &Assignment) -> bool {
        self.pattern.len() == p.arity()
            && self.pattern.iter().zip(p.values()).all(|(pat, v)| pat.as_ref().is_none_or(|x| x == v))
    }
}

/// `(P, F, S)`: a variable space, a surjective partial observation function
/// and its state set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateModel {
    space: VariableSpace,
    states: BTreeSet<StateName>,
    f: BTreeMap<Assignment, StateName>,
}

impl StateModel {
    pub fn new(
        space: VariableSpace,
        states: BTreeSet<StateName>,
        f: BTreeMap<Assignment, StateName>,
    ) -> Result<Self, PmError> {
        for (p, s) in &f {
            space.check(p)?;
            if !states.contains(s) {
                return Err(PmError::UnknownState(s.clone()));
            }
        }
        let image: BTreeSet<&StateName> = f.values().collect();
        if let Some(s) = states.iter().find(|s| !image.contains(s)) {
            return Err(PmError::NotSurjective(s.clone()));
        }
        Ok(StateModel { space, states, f })
    }

    /// Builds `F` from first-match-wins rows. `states` defaults to the set of
    /// row targets. A row that matches no assignment left unclaimed by earlier
    /// rows is rejected as inconsistent.
    pub fn from_rows(space: VariableSpace, states: Option<BTreeSet<StateName>>, rows: &[Row]) -> Result<Self, PmError> {
        for row in rows {
            if row.pattern.len() != space.arity() {
                return Err(PmError::ArityMismatch { expected: space.arity(), got: row.pattern.len() });
            }
            for (v, pat) in space.vars().iter().zip(&row.pattern) {
                if let Some(x) = pat {
                    if !v.domain.contains(x) {
                        return Err(PmError::ValueOutOfDomain { var: v.name.clone(), value: x.clone() });
                    }
                }
            }
        }
        let mut f = BTreeMap::new();
        let mut claimed = vec![false; rows.len()];
        for p in space.assignments() {
            if let Some(i) = rows.iter().position(|r| r.matches(&p)) {
                claimed[i] = true;
                f.insert(p, rows[i].state.clone());
            }
        }
        if let Some(i) = claimed.iter().position(|c| !c) {
            return Err(PmError::ShadowedRow(i));
        }
        let states = states.unwrap_or_else(|| rows.iter().map(|r| r.state.clone()).collect());
        StateModel::new(space, states, f)
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    pub fn states(&self) -> &BTreeSet<StateName> {
        &self.states
    }

    pub fn table(&self) -> &BTreeMap<Assignment, StateName> {
        &self.f
    }

    /// `F(p)`, or `Unobservable` outside `dom(F)`.
    pub fn observe(&self, p: &Assignment) -> Result<Observation, PmError> {
        self.space.check(p)?;
        Ok(match self.f.get(p) {
            Some(s) => Observation::Observed(s.clone()),
            None => Observation::Unobservable,
        })
    }

    /// All `p` with `F(p) = s`, in enumeration order.
    pub fn preimage<'a>(&'a self, s: &'a str) -> impl Iterator<Item = &'a Assignment> + 'a {
        self.f.iter().filter(move |(_, t)| t.as_str() == s).map(|(p, _)| p)
    }

    pub(crate) fn permuted(&self, order: &[usize]) -> Result<StateModel, PmError> {
        let vars = order.iter().map(|&i| self.space.vars()[i].clone()).collect();
        let space = VariableSpace::new(vars)?;
        let f = self
            .f
            .iter()
            .map(|(p, s)| (Assignment(order.iter().map(|&i| p.0[i].clone()).collect()), s.clone()))
            .collect();
        StateModel::new(space, self.states.clone(), f)
    }
}

/// `(P, F, S, T)` with an optional initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessModel {
    state_model: StateModel,
    transitions: BTreeSet<Transition>,
    initial: Option<StateName>,
}

impl ProcessModel {
    pub fn new(
        state_model: StateModel,
        transitions: BTreeSet<Transition>,
        initial: Option<StateName>,
    ) -> Result<Self, PmError> {
        for (a, b) in &transitions {
            for s in [a, b] {
                if !state_model.states().contains(s) {
                    return Err(PmError::UnknownState(s.clone()));
                }
            }
        }
        if let Some(s) = &initial {
            if !state_model.states().contains(s) {
                return Err(PmError::UnknownState(s.clone()));
            }
        }
        Ok(ProcessModel { state_model, transitions, initial })
    }

    pub fn state_model(&self) -> &StateModel {
        &self.state_model
    }

    pub fn space(&self) -> &VariableSpace {
        self.state_model.space()
    }

    pub fn states(&self) -> &BTreeSet<StateName> {
        self.state_model.states()
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn initial(&self) -> Option<&str> {
        self.initial.as_deref()
    }

    pub fn observe(&self, p: &Assignment) -> Result<Observation, PmError> {
        self.state_model.observe(p)
    }

    /// Breadth-first predecessor map from the initial state.
    pub(crate) fn bfs_parents(&self) -> Result<BTreeMap<StateName, Option<StateName>>, PmError> {
        let s0 = self.initial.clone().ok_or(PmError::MissingInitialState)?;
        let mut parent = BTreeMap::new();
        parent.insert(s0.clone(), None);
        let mut queue = VecDeque::from([s0]);
        while let Some(s) = queue.pop_front() {
            for (_, b) in self.transitions.range((s.clone(), String::new())..).take_while(|(a, _)| *a == s) {
                if !parent.contains_key(b) {
                    parent.insert(b.clone(), Some(s.clone()));
                    queue.push_back(b.clone());
                }
            }
        }
        Ok(parent)
    }

    pub(crate) fn permuted(&self, order: &[usize]) -> Result<ProcessModel, PmError> {
        ProcessModel::new(self.state_model.permuted(order)?, self.transitions.clone(), self.initial.clone())
    }
}

/// Checks that every state is reachable from the initial state through `T`.
pub fn check_ground_truth(pm: &ProcessModel) -> Result<(), PmError> {
    let parents = pm.bfs_parents()?;
    let unreachable: BTreeSet<StateName> = pm.states().iter().filter(|s| !parents.contains_key(*s)).cloned().collect();
    if unreachable.is_empty() {
        Ok(())
    } else {
        Err(PmError::UnreachableStates(unreachable))
    }
}
