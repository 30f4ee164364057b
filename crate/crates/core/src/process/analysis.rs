use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::connection::Connection;
use super::model::{check_ground_truth, Observation, StateName, Transition};
use super::space::Assignment;
use super::PmError;

/// Set differences between a known model and its ground truth.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModelDiff {
    pub forced_states: BTreeSet<StateName>,
    pub forced_transitions: BTreeSet<Transition>,
    pub incorrect_states: BTreeSet<StateName>,
    pub incorrect_transitions: BTreeSet<Transition>,
}

impl ModelDiff {
    pub fn is_incomplete(&self) -> bool {
        !self.forced_states.is_empty() || !self.forced_transitions.is_empty()
    }

    pub fn is_incorrect(&self) -> bool {
        !self.incorrect_states.is_empty() || !self.incorrect_transitions.is_empty()
    }
}

pub fn diff_models(c: &Connection) -> ModelDiff {
    let (k, r) = (c.known(), c.ground());
    ModelDiff {
        forced_states: r.states().difference(k.states()).cloned().collect(),
        forced_transitions: r.transitions().difference(k.transitions()).cloned().collect(),
        incorrect_states: k.states().difference(r.states()).cloned().collect(),
        incorrect_transitions: k.transitions().difference(r.transitions()).cloned().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Unobservable,
    /// Both endpoints observable, but seen as this pair.
    IncorrectlyObserved(Transition),
    CorrectlyObservedForced,
    CorrectlyObservedKnown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Unobservable => f.write_str("Unobservable"),
            Classification::IncorrectlyObserved((a, b)) => write!(f, "IncorrectlyObserved({a} -> {b})"),
            Classification::CorrectlyObservedForced => f.write_str("CorrectlyObservedForced"),
            Classification::CorrectlyObservedKnown => f.write_str("CorrectlyObservedKnown"),
        }
    }
}

/// A classified ground-truth transition together with the assignments
/// that realize it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PmiFinding {
    pub transition: Transition,
    pub witness: (Assignment, Assignment),
    pub classification: Classification,
}

impl PmiFinding {
    /// Unobservable or incorrectly observed.
    pub fn is_pmi(&self) -> bool {
        matches!(self.classification, Classification::Unobservable | Classification::IncorrectlyObserved(_))
    }
}

pub fn classify_transition(c: &Connection, pa: &Assignment, pb: &Assignment) -> Result<PmiFinding, PmError> {
    let ground = c.ground();
    let sa = ground.observe(pa)?;
    let sb = ground.observe(pb)?;
    let t = match (sa, sb) {
        (Observation::Observed(a), Observation::Observed(b))
            if ground.transitions().contains(&(a.clone(), b.clone())) =>
        {
            (a, b)
        }
        (a, b) => {
            let name = |o: Observation| o.state().map_or_else(|| "?".to_string(), str::to_string);
            return Err(PmError::NotAGroundTransition(name(a), name(b)));
        }
    };
    let classification = match (c.observe_ground_in_known(pa)?, c.observe_ground_in_known(pb)?) {
        (Observation::Observed(ka), Observation::Observed(kb)) => {
            if (&ka, &kb) != (&t.0, &t.1) {
                Classification::IncorrectlyObserved((ka, kb))
            } else if c.known().transitions().contains(&t) {
                Classification::CorrectlyObservedKnown
            } else {
                Classification::CorrectlyObservedForced
            }
        }
        _ => Classification::Unobservable,
    };
    Ok(PmiFinding { transition: t, witness: (pa.clone(), pb.clone()), classification })
}

/// A forced transition entering (or, for a forced initial state, touching)
/// the given forced state: the last step of a shortest path from the
/// initial state.
pub fn lemma1_witness(c: &Connection, forced_state: &str) -> Result<Transition, PmError> {
    if !diff_models(c).forced_states.contains(forced_state) {
        return Err(PmError::NotAForcedState(forced_state.to_string()));
    }
    let ground = c.ground();
    check_ground_truth(ground)?;
    let parents = ground.bfs_parents()?;
    if let Some(Some(prev)) = parents.get(forced_state) {
        return Ok((prev.clone(), forced_state.to_string()));
    }
    // The forced state is the initial state itself. Any edge touching it
    // leaves the known model's state set, so it cannot be a known transition.
    let ts = ground.transitions();
    ts.iter()
        .find(|(_, b)| b == forced_state)
        .or_else(|| ts.iter().find(|(a, _)| a == forced_state))
        .cloned()
        .ok_or_else(|| PmError::NoForcedTransition(forced_state.to_string()))
}

/// Which branch of the case analysis produced a theorem outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProofCase {
    /// A forced endpoint with an unobservable witness.
    Case1a,
    /// A forced endpoint observed as some known state.
    Case1b,
    /// Known endpoints, some witness unobservable.
    Case2a,
    /// Known endpoints, observable but seen as a different pair.
    Case2bi,
    /// Known endpoints, correctly observed.
    Case2bii,
}

impl fmt::Display for ProofCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofCase::Case1a => "1a",
            ProofCase::Case1b => "1b",
            ProofCase::Case2a => "2a",
            ProofCase::Case2bi => "2b(i)",
            ProofCase::Case2bii => "2b(ii)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremOutcome {
    PmiInstance { finding: PmiFinding, case: ProofCase },
    CorrectlyObservedForcedTransition { finding: PmiFinding },
}

impl TheoremOutcome {
    pub fn finding(&self) -> &PmiFinding {
        match self {
            TheoremOutcome::PmiInstance { finding, .. } => finding,
            TheoremOutcome::CorrectlyObservedForcedTransition { finding } => finding,
        }
    }

    pub fn case(&self) -> ProofCase {
        match self {
            TheoremOutcome::PmiInstance { case, .. } => *case,
            TheoremOutcome::CorrectlyObservedForcedTransition { .. } => ProofCase::Case2bii,
        }
    }
}

/// Runs the case analysis over every forced transition and every witness
/// pair, returning the first PMI instance found. If none exists, every
/// forced transition is correctly observed and the first one is returned.
pub fn theorem1_check(c: &Connection) -> Result<TheoremOutcome, PmError> {
    let diff = diff_models(c);
    if !diff.is_incomplete() {
        return Err(PmError::NotIncomplete);
    }
    let forced: Vec<Transition> = if diff.forced_transitions.is_empty() {
        let s = diff.forced_states.iter().next().expect("incomplete without forced transitions");
        vec![lemma1_witness(c, s)?]
    } else {
        diff.forced_transitions.iter().cloned().collect()
    };

    let known_states = c.known().states();
    let sm = c.ground().state_model();
    let mut fallback = None;
    for t in &forced {
        let endpoint_forced = !known_states.contains(&t.0) || !known_states.contains(&t.1);
        for pa in sm.preimage(&t.0) {
            for pb in sm.preimage(&t.1) {
                let finding = classify_transition(c, pa, pb)?;
                let case = match (&finding.classification, endpoint_forced) {
                    (Classification::Unobservable, true) => ProofCase::Case1a,
                    (Classification::IncorrectlyObserved(_), true) => ProofCase::Case1b,
                    (Classification::Unobservable, false) => ProofCase::Case2a,
                    (Classification::IncorrectlyObserved(_), false) => ProofCase::Case2bi,
                    _ => {
                        fallback.get_or_insert(finding);
                        continue;
                    }
                };
                return Ok(TheoremOutcome::PmiInstance { finding, case });
            }
        }
    }
    let finding = fallback.expect("every state has a preimage");
    Ok(TheoremOutcome::CorrectlyObservedForcedTransition { finding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::model::{transition, ProcessModel, Row, StateModel};
    use crate::process::space::{Variable, VariableSpace};
    use crate::value::{syms, Value};
    use std::collections::BTreeMap;

    fn s(x: &str) -> Option<Value> {
        Some(Value::sym(x))
    }

    fn space(extra: bool) -> VariableSpace {
        let mut vars =
            vec![Variable::new("door", syms(&["CLOSED", "OPEN"])), Variable::new("motor", syms(&["ON", "OFF"]))];
        if extra {
            vars.push(Variable::new("load", syms(&["LIGHT", "HEAVY"])));
        }
        VariableSpace::new(vars).unwrap()
    }

    fn known() -> ProcessModel {
        let sm = StateModel::from_rows(
            space(false),
            None,
            &[Row::new(vec![s("CLOSED"), None], "RUNNING"), Row::new(vec![s("OPEN"), s("OFF")], "STOPPED")],
        )
        .unwrap();
        let t = [transition("RUNNING", "STOPPED"), transition("STOPPED", "RUNNING")];
        ProcessModel::new(sm, t.into_iter().collect(), Some("RUNNING".into())).unwrap()
    }

    /// Known model plus an `X` state for (OPEN, ON) entered from STOPPED.
    fn car() -> Connection {
        let sm = StateModel::from_rows(
            space(true),
            None,
            &[
                Row::new(vec![s("CLOSED"), None, None], "RUNNING"),
                Row::new(vec![s("OPEN"), s("OFF"), None], "STOPPED"),
                Row::new(vec![s("OPEN"), s("ON"), None], "X"),
            ],
        )
        .unwrap();
        let mut t = known().transitions().clone();
        t.insert(transition("STOPPED", "X"));
        let ground = ProcessModel::new(sm, t, Some("RUNNING".into())).unwrap();
        Connection::new(known(), ground, &BTreeMap::from([("load".into(), Value::sym("LIGHT"))])).unwrap()
    }

    fn a(v: &[&str]) -> Assignment {
        Assignment(syms(v))
    }

    #[test]
    fn car_controller_diff() {
        let d = diff_models(&car());
        assert_eq!(d.forced_states, BTreeSet::from(["X".to_string()]));
        assert_eq!(d.forced_transitions, BTreeSet::from([transition("STOPPED", "X")]));
        assert!(d.incorrect_states.is_empty() && d.incorrect_transitions.is_empty());
        assert!(d.is_incomplete() && !d.is_incorrect());
    }

    #[test]
    fn car_controller_witness_and_theorem() {
        let c = car();
        assert_eq!(lemma1_witness(&c, "X").unwrap(), transition("STOPPED", "X"));
        assert_eq!(lemma1_witness(&c, "STOPPED"), Err(PmError::NotAForcedState("STOPPED".into())));
        let out = theorem1_check(&c).unwrap();
        assert_eq!(out.case(), ProofCase::Case1a);
        assert_eq!(out.finding().transition, transition("STOPPED", "X"));
        assert!(out.finding().is_pmi());
    }

    #[test]
    fn classification() {
        let c = car();
        let f = classify_transition(&c, &a(&["OPEN", "OFF", "LIGHT"]), &a(&["OPEN", "ON", "HEAVY"])).unwrap();
        assert_eq!(f.classification, Classification::Unobservable);
        let f = classify_transition(&c, &a(&["CLOSED", "ON", "LIGHT"]), &a(&["OPEN", "OFF", "LIGHT"])).unwrap();
        assert_eq!(f.classification, Classification::CorrectlyObservedKnown);
        assert_eq!(
            classify_transition(&c, &a(&["OPEN", "OFF", "LIGHT"]), &a(&["OPEN", "OFF", "LIGHT"])),
            Err(PmError::NotAGroundTransition("STOPPED".into(), "STOPPED".into()))
        );
    }

    #[test]
    fn identical_models_diff_empty() {
        let k = known();
        let ground = ProcessModel::new(
            StateModel::from_rows(
                space(true),
                None,
                &[
                    Row::new(vec![s("CLOSED"), None, None], "RUNNING"),
                    Row::new(vec![s("OPEN"), s("OFF"), None], "STOPPED"),
                ],
            )
            .unwrap(),
            k.transitions().clone(),
            Some("RUNNING".into()),
        )
        .unwrap();
        let c = Connection::new(k, ground, &BTreeMap::from([("load".into(), Value::sym("LIGHT"))])).unwrap();
        assert_eq!(diff_models(&c), ModelDiff::default());
        assert_eq!(theorem1_check(&c), Err(PmError::NotIncomplete));
    }

    #[test]
    fn faithful_forced_transition_is_case_2bii() {
        // ground adds a direct RUNNING self-loop the known model omits
        let c = car();
        let mut t = c.known().transitions().clone();
        t.insert(transition("RUNNING", "RUNNING"));
        let sm = StateModel::from_rows(
            space(true),
            None,
            &[Row::new(vec![s("CLOSED"), None, None], "RUNNING"), Row::new(vec![s("OPEN"), s("OFF"), None], "STOPPED")],
        )
        .unwrap();
        let ground = ProcessModel::new(sm, t, Some("RUNNING".into())).unwrap();
        let c = Connection::new(known(), ground, &BTreeMap::from([("load".into(), Value::sym("LIGHT"))])).unwrap();
        let out = theorem1_check(&c).unwrap();
        assert!(matches!(out, TheoremOutcome::CorrectlyObservedForcedTransition { .. }));
        assert_eq!(out.finding().classification, Classification::CorrectlyObservedForced);
    }

    #[test]
    fn forced_initial_state_uses_incident_edge() {
        let sm = StateModel::from_rows(
            space(true),
            None,
            &[
                Row::new(vec![s("OPEN"), s("ON"), None], "X"),
                Row::new(vec![s("CLOSED"), None, None], "RUNNING"),
                Row::new(vec![s("OPEN"), s("OFF"), None], "STOPPED"),
            ],
        )
        .unwrap();
        let mut t = known().transitions().clone();
        t.insert(transition("X", "RUNNING"));
        let ground = ProcessModel::new(sm, t, Some("X".into())).unwrap();
        let c = Connection::new(known(), ground, &BTreeMap::from([("load".into(), Value::sym("LIGHT"))])).unwrap();
        assert_eq!(lemma1_witness(&c, "X").unwrap(), transition("X", "RUNNING"));
    }
}
