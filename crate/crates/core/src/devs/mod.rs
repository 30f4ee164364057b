//! Deterministic DEVS kernel: atomic and coupled models, port routing and
//! the event log.

mod builder;
mod message;
mod model;
mod sim;
mod spec;
mod trace;

pub use builder::{AtomicBuilder, EmitSrc};
pub use message::{fields, Endpoint, Fields, Message, Output};
pub use model::{Atomic, Ctx, ModelError, Note, RuleModel};
pub use sim::{build_coupled, run, Simulation, System, DEFAULT_ZERO_DELAY_BOUND};
pub use spec::{
    AtomicSpec, ComponentSpec, CoupledSpec, Coupling, CouplingKind, Emit, ExternalRule, Factory, HostedSpec,
    InternalRule, Updates,
};
pub use trace::{parse_jsonl, to_jsonl, Detail, EventKind, MessageRecord, StateSnapshot, TraceError, TraceEvent};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DevsError {
    #[error("dangling coupling {0}")]
    DanglingCoupling(String),
    #[error("component `{0}` influences itself")]
    SelfInfluence(String),
    #[error("duplicate component label `{0}`")]
    DuplicateLabel(String),
    #[error("more than {bound} zero-time steps at t={time}")]
    NonterminatingZeroDelay { time: String, bound: usize },
    #[error("unknown input port `{0}`")]
    UnknownPort(String),
    #[error("message for t={at} injected at t={now}")]
    TimeInPast { at: String, now: String },
    #[error("invalid message: {0}")]
    InvalidMessage(String),
    #[error("component `{component}` has a negative time advance")]
    NegativeTimeAdvance { component: String },
    #[error("model error: {0}")]
    Model(#[from] ModelError),
}
