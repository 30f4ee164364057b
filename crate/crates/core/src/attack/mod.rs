//! Man-in-the-middle effect injection.

mod audit;
mod insert;
mod interceptor;

pub use audit::{effect_application_count, observable_projection, Delivery, Observed};
pub use insert::{insert_attack_simulator, InterceptPlan, Rewire};
pub use interceptor::Interceptor;

use crate::devs::DevsError;

/// Component id of the inserted attack simulator.
pub const SIM_ID: &str = "__attack_sim__";

#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("unknown target component `{0}`")]
    UnknownTarget(String),
    #[error("the system already contains an attack simulator")]
    AlreadyInserted,
    #[error("unknown effect `{0}`")]
    UnknownEffect(String),
    #[error("effect `{effect}` generates {from} -> {to}, but no intercepted coupling connects them")]
    Unroutable { effect: String, from: String, to: String },
    #[error(transparent)]
    Devs(#[from] DevsError),
}
