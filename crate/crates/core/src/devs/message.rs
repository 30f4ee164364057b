use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::TimeScalar;
use crate::value::Value;
use crate::Time;

pub type Fields = BTreeMap<String, Value>;

/// A component port.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub component: String,
    pub port: String,
}

impl Endpoint {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Endpoint { component: component.into(), port: port.into() }
    }

    /// Parses `Component.port`.
    pub fn parse(s: &str) -> Option<Endpoint> {
        let (c, p) = s.split_once('.')?;
        (!c.is_empty() && !p.is_empty() && !p.contains('.')).then(|| Endpoint::new(c, p))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.port)
    }
}

/// A routed message. `source` is the logical sender, which for relayed
/// traffic is the original sender rather than the relay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message<T = Time> {
    pub id: u64,
    pub msg_type: String,
    pub source: Endpoint,
    pub target: Endpoint,
    pub fields: Fields,
    pub send_time: T,
    pub delivery_time: T,
}

impl<T: TimeScalar> Message<T> {
    /// A message delivered at its send time. The id is assigned by the kernel.
    pub fn new(msg_type: impl Into<String>, source: Endpoint, target: Endpoint, fields: Fields, at: T) -> Self {
        Message { id: 0, msg_type: msg_type.into(), source, target, fields, send_time: at, delivery_time: at }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        self.fields.get(name)
    }
}

/// One element of an atomic model's output bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub port: String,
    pub msg_type: String,
    pub fields: Fields,
    /// Logical sender to record instead of the emitting component.
    pub origin: Option<Endpoint>,
    /// Message id reserved earlier through the transition context.
    pub id: Option<u64>,
}

impl Output {
    pub fn new(port: impl Into<String>, msg_type: impl Into<String>, fields: Fields) -> Self {
        Output { port: port.into(), msg_type: msg_type.into(), fields, origin: None, id: None }
    }
}

pub fn fields<const N: usize>(pairs: [(&str, Value); N]) -> Fields {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
