//! Event log records and their line-delimited JSON form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::message::{Fields, Message};
use crate::time::TimeScalar;
use crate::value::Value;
use crate::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    MessageSent,
    MessageDelivered,
    InternalTransition,
    ExternalTransition,
    ConfluentTransition,
    StateChange,
    EffectApplied,
    EffectActivated,
    EffectDeactivated,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::MessageSent => "message_sent",
            EventKind::MessageDelivered => "message_delivered",
            EventKind::InternalTransition => "internal_transition",
            EventKind::ExternalTransition => "external_transition",
            EventKind::ConfluentTransition => "confluent_transition",
            EventKind::StateChange => "state_change",
            EventKind::EffectApplied => "effect_applied",
            EventKind::EffectActivated => "effect_activated",
            EventKind::EffectDeactivated => "effect_deactivated",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Variable name to value snapshot of an atomic state.
pub type StateSnapshot = BTreeMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub id: u64,
    pub msg_type: String,
    pub from: String,
    pub to: String,
    pub fields: Fields,
    pub send: (i64, i64),
    pub delivery: (i64, i64),
}

impl<T: TimeScalar> From<&Message<T>> for MessageRecord {
    fn from(m: &Message<T>) -> Self {
        MessageRecord {
            id: m.id,
            msg_type: m.msg_type.clone(),
            from: m.source.to_string(),
            to: m.target.to_string(),
            fields: m.fields.clone(),
            send: m.send_time.to_ratio(),
            delivery: m.delivery_time.to_ratio(),
        }
    }
}

/// Structured payload; which members are present depends on the kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detail {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<MessageRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old: Option<StateSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new: Option<StateSnapshot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bag: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drops: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent<T = Time> {
    pub seq: u64,
    pub time: T,
    pub kind: EventKind,
    pub subject: String,
    pub detail: Detail,
}

#[derive(Serialize, Deserialize)]
struct Line {
    seq: u64,
    t_num: i64,
    t_den: i64,
    kind: EventKind,
    subject: String,
    detail: Detail,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: time {num}/{den} is not representable")]
    Time { line: usize, num: i64, den: i64 },
}

impl<T: TimeScalar> TraceEvent<T> {
    pub fn to_json_line(&self) -> String {
        let (t_num, t_den) = self.time.to_ratio();
        let line = Line {
            seq: self.seq,
            t_num,
            t_den,
            kind: self.kind,
            subject: self.subject.clone(),
            detail: self.detail.clone(),
        };
        serde_json::to_string(&line).expect("trace records serialize")
    }
}

pub fn to_jsonl<T: TimeScalar>(events: &[TraceEvent<T>]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_json_line());
        out.push('\n');
    }
    out
}

pub fn parse_jsonl<T: TimeScalar>(text: &str) -> Result<Vec<TraceEvent<T>>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw).map_err(|source| TraceError::Json { line: i + 1, source })?;
        let time = T::from_ratio(line.t_num, line.t_den).ok_or(TraceError::Time {
            line: i + 1,
            num: line.t_num,
            den: line.t_den,
        })?;
        out.push(TraceEvent { seq: line.seq, time, kind: line.kind, subject: line.subject, detail: line.detail });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn key_order_and_roundtrip() {
        let ev: TraceEvent<Time> = TraceEvent {
            seq: 7,
            time: Ratio::new(3, 2),
            kind: EventKind::StateChange,
            subject: "Motor".into(),
            detail: Detail { new: Some(StateSnapshot::from([("pos".into(), Value::Int(2))])), ..Detail::default() },
        };
        let line = ev.to_json_line();
        assert_eq!(
            line,
            r#"{"seq":7,"t_num":3,"t_den":2,"kind":"state_change","subject":"Motor","detail":{"new":{"pos":2}}}"#
        );
        let back: Vec<TraceEvent<Time>> = parse_jsonl(&to_jsonl(std::slice::from_ref(&ev))).unwrap();
        assert_eq!(back, vec![ev]);
    }

    #[test]
    fn integer_time_rejects_fractions() {
        let text = r#"{"seq":0,"t_num":1,"t_den":2,"kind":"state_change","subject":"a","detail":{}}"#;
        assert!(matches!(parse_jsonl::<i64>(text), Err(TraceError::Time { line: 1, .. })));
    }
}
