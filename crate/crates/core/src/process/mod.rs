//! Known and ground-truth process models, their connection, and the
//! observability analysis built on top of them.

use std::collections::BTreeSet;

use crate::value::Value;

mod analysis;
mod connection;
mod model;
mod safety;
mod space;

pub use analysis::{
    classify_transition, diff_models, lemma1_witness, theorem1_check, Classification, ModelDiff, PmiFinding, ProofCase,
    TheoremOutcome,
};
pub use connection::Connection;
pub use model::{check_ground_truth, transition, Observation, ProcessModel, Row, StateModel, StateName, Transition};
pub use safety::{evaluate_safety, SafetyProperty, Verdict};
pub use space::{Assignment, Assignments, Variable, VariableSpace};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PmError {
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{0}` lists value `{1}` twice")]
    DuplicateDomainValue(String, Value),
    #[error("assignment has {got} values, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("value `{value}` is outside the domain of `{var}`")]
    ValueOutOfDomain { var: String, value: Value },
    #[error("no value for variable `{0}`")]
    MissingVariable(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{0}` has no preimage under the observation function")]
    NotSurjective(String),
    #[error("row {0} is shadowed by earlier rows and matches nothing")]
    ShadowedRow(usize),
    #[error("process model has no initial state")]
    MissingInitialState,
    #[error("states unreachable from the initial state: {0:?}")]
    UnreachableStates(BTreeSet<String>),
    #[error("ground space must have more variables than the known space ({known} vs {ground})")]
    GroundNotLarger { known: usize, ground: usize },
    #[error("known variable `{0}` is missing from the ground space")]
    MissingSharedVariable(String),
    #[error("value `{value}` of known variable `{var}` is outside its ground domain")]
    DomainNotSubset { var: String, value: Value },
    #[error("no default given for ground-only variable `{0}`")]
    MissingDefault(String),
    #[error("default given for `{0}`, which is not a ground-only variable")]
    UnexpectedDefault(String),
    #[error("`{0}` is not a forced state")]
    NotAForcedState(String),
    #[error("({0}, {1}) is not a ground-truth transition")]
    NotAGroundTransition(String, String),
    #[error("known model is complete with respect to the ground truth")]
    NotIncomplete,
    #[error("forced state `{0}` has no incident transition")]
    NoForcedTransition(String),
    #[error("safety property `{name}`: {reason}")]
    BadSafetyProperty { name: String, reason: String },
    #[error("safety property `{name}` disagrees on assignments {a} and {b}, both observed as `{state}`")]
    InconsistentSafety { name: String, state: String, a: Assignment, b: Assignment },
}
