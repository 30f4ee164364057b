use std::collections::BTreeMap;

use serde::Serialize;

use super::Scenario;
use crate::devs::{EventKind, TraceEvent};
use crate::process::{classify_transition, Assignment, PmiFinding, Transition, Verdict};
use crate::Time;

/// The ground assignment of one connection at the end of an instant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundSample {
    pub time: Time,
    pub component: String,
    pub assignment: Assignment,
    /// `None` when the ground observation function is undefined there.
    pub state: Option<String>,
}

/// A change of ground state that the ground model does not list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unmodeled {
    pub time: Time,
    pub component: String,
    pub from: Option<String>,
    pub to: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SafetyViolation {
    pub time: Time,
    pub component: String,
    pub properties: Vec<String>,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimedFinding {
    pub time: Time,
    pub component: String,
    pub finding: PmiFinding,
}

/// Everything the scenario's connections say about one trace.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Monitored {
    pub samples: Vec<GroundSample>,
    /// One per ground-state change that the ground model lists.
    pub findings: Vec<TimedFinding>,
    pub unmodeled: Vec<Unmodeled>,
    pub violations: Vec<SafetyViolation>,
}

impl Monitored {
    pub fn pmi_findings(&self) -> impl Iterator<Item = &TimedFinding> {
        self.findings.iter().filter(|f| f.finding.is_pmi())
    }

    /// Ground transitions taken, in order, for one component.
    pub fn transitions_of<'a>(&'a self, component: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.findings.iter().filter(move |f| f.component == component).map(|f| &f.finding.transition)
    }
}

struct Last {
    assignment: Assignment,
    state: Option<String>,
}

/// Replays the state changes of a trace and reads every connection's
/// ground variables at the start and at the end of each instant in which
/// some component changed state. Each change of ground state is classified
/// against the known model; each sampled assignment is checked against the
/// component's safety properties.
pub fn monitor_trace(scenario: &Scenario, trace: &[TraceEvent]) -> Result<Monitored, String> {
    let mut states = scenario.initial_states();
    let mut out = Monitored::default();
    let mut last: BTreeMap<&str, Last> = BTreeMap::new();

    let mut sample = |t: Time, states: &BTreeMap<_, _>, out: &mut Monitored| -> Result<(), String> {
        for (comp, probe) in &scenario.connections {
            let p = probe.sample(states).map_err(|e| format!("{comp} at t={t}: {e}"))?;
            if last.get(comp.as_str()).is_some_and(|l| l.assignment == p) {
                continue;
            }
            let ground = probe.connection.ground();
            let state = ground.observe(&p).map_err(|e| e.to_string())?.state().map(str::to_string);

            let props: Vec<_> =
                scenario.safety.iter().filter(|s| &s.component == comp).map(|s| s.property.clone()).collect();
            if let Verdict::Bad(names) = crate::process::evaluate_safety(&props, &p).map_err(|e| e.to_string())? {
                out.violations.push(SafetyViolation {
                    time: t,
                    component: comp.clone(),
                    properties: names,
                    assignment: p.clone(),
                });
            }

            if let Some(prev) = last.get(comp.as_str()) {
                if prev.state != state {
                    let listed = match (&prev.state, &state) {
                        (Some(a), Some(b)) => ground.transitions().contains(&(a.clone(), b.clone())),
                        _ => false,
                    };
                    if listed {
                        let finding =
                            classify_transition(&probe.connection, &prev.assignment, &p).map_err(|e| e.to_string())?;
                        out.findings.push(TimedFinding { time: t, component: comp.clone(), finding });
                    } else {
                        out.unmodeled.push(Unmodeled {
                            time: t,
                            component: comp.clone(),
                            from: prev.state.clone(),
                            to: state.clone(),
                        });
                    }
                }
            }
            out.samples.push(GroundSample {
                time: t,
                component: comp.clone(),
                assignment: p.clone(),
                state: state.clone(),
            });
            last.insert(comp.as_str(), Last { assignment: p, state });
        }
        Ok(())
    };

    sample(Time::from_integer(0), &states, &mut out)?;
    let mut i = 0;
    while i < trace.len() {
        let t = trace[i].time;
        let mut changed = false;
        while i < trace.len() && trace[i].time == t {
            let ev = &trace[i];
            if ev.kind == EventKind::StateChange {
                if let (Some(slot), Some(new)) = (states.get_mut(&ev.subject), &ev.detail.new) {
                    *slot = new.clone();
                    changed = true;
                }
            }
            i += 1;
        }
        if changed {
            sample(t, &states, &mut out)?;
        }
    }
    Ok(out)
}
