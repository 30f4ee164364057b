use std::collections::BTreeMap;

use super::{AttackError, SIM_ID};
use crate::devs::{EventKind, Fields, StateSnapshot, TraceEvent};
use crate::effects::EffectProgram;
use crate::time::TimeScalar;

/// A delivery as the receiver sees it: port, type, logical sender, fields.
pub type Delivery = (String, String, String, Fields);

/// What one component experienced at one instant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Observed {
    /// Sorted, so that splitting one bag into several zero-time bags does
    /// not matter.
    pub deliveries: Vec<Delivery>,
    /// State at the end of the instant, present only if it differs from the
    /// state at its start.
    pub state: Option<StateSnapshot>,
}

/// The part of a trace that the modeled components can observe: per instant
/// and component, the messages delivered and the net state change. Records
/// about the attack simulator itself are ignored.
pub fn observable_projection<T: TimeScalar>(trace: &[TraceEvent<T>]) -> BTreeMap<(T, String), Observed> {
    let mut out: BTreeMap<(T, String), Observed> = BTreeMap::new();
    let mut first_old: BTreeMap<(T, String), StateSnapshot> = BTreeMap::new();
    for ev in trace.iter().filter(|e| e.subject != SIM_ID) {
        let key = (ev.time, ev.subject.clone());
        match ev.kind {
            EventKind::MessageDelivered => {
                let m = ev.detail.message.as_ref().expect("deliveries carry their message");
                let port = m.to.rsplit_once('.').map_or(m.to.as_str(), |(_, p)| p).to_string();
                out.entry(key).or_default().deliveries.push((
                    port,
                    m.msg_type.clone(),
                    m.from.clone(),
                    m.fields.clone(),
                ));
            }
            EventKind::StateChange => {
                if let Some(old) = &ev.detail.old {
                    first_old.entry(key.clone()).or_insert_with(|| old.clone());
                }
                out.entry(key).or_default().state = ev.detail.new.clone();
            }
            _ => {}
        }
    }
    for (key, obs) in out.iter_mut() {
        obs.deliveries.sort();
        if obs.state.is_some() && obs.state.as_ref() == first_old.get(key) {
            obs.state = None;
        }
    }
    out.retain(|_, o| !o.deliveries.is_empty() || o.state.is_some());
    out
}

/// Number of `effect_applied` records for a defined effect.
pub fn effect_application_count<T>(
    program: &EffectProgram,
    trace: &[TraceEvent<T>],
    effect: &str,
) -> Result<usize, AttackError> {
    if program.effect(effect).is_none() {
        return Err(AttackError::UnknownEffect(effect.to_string()));
    }
    Ok(trace
        .iter()
        .filter(|e| e.kind == EventKind::EffectApplied && e.detail.effect.as_deref() == Some(effect))
        .count())
}
