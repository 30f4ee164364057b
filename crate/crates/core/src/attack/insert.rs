use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use super::interceptor::Interceptor;
use super::{AttackError, SIM_ID};
use crate::devs::{ComponentSpec, CoupledSpec, Coupling, CouplingKind, Endpoint, HostedSpec};
use crate::effects::{EffectProgram, Operator};
use crate::time::TimeScalar;

/// One coupling replaced by a hop through the attack simulator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rewire {
    pub original: Coupling,
    pub into_sim: Coupling,
    pub out_of_sim: Coupling,
}

/// Which leaves are intercepted and how their couplings were rewired.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InterceptPlan {
    /// Intercepted leaf ids; coupled targets are expanded to their leaves.
    pub targets: BTreeSet<String>,
    pub rewired: Vec<Rewire>,
}

impl InterceptPlan {
    /// Destinations behind each simulator input port.
    pub fn inbound(&self) -> BTreeMap<String, Vec<Endpoint>> {
        let mut m: BTreeMap<String, Vec<Endpoint>> = BTreeMap::new();
        for r in &self.rewired {
            m.entry(r.into_sim.to.port.clone()).or_default().push(r.original.to.clone());
        }
        m
    }

    /// Simulator output port feeding each intercepted destination.
    pub fn outbound(&self) -> BTreeMap<Endpoint, String> {
        self.rewired.iter().map(|r| (r.original.to.clone(), r.out_of_sim.from.port.clone())).collect()
    }

    /// The first intercepted coupling from one component to another, used to
    /// route generated messages.
    pub fn route(&self, from: &str, to: &str) -> Option<&Coupling> {
        self.rewired.iter().map(|r| &r.original).find(|c| c.from.component == from && c.to.component == to)
    }

    fn ports(&self) -> (Vec<String>, Vec<String>) {
        let ins: BTreeSet<String> = self.rewired.iter().map(|r| r.into_sim.to.port.clone()).collect();
        let outs: BTreeSet<String> = self.rewired.iter().map(|r| r.out_of_sim.from.port.clone()).collect();
        (ins.into_iter().collect(), outs.into_iter().collect())
    }
}

fn leaf_ids<T: TimeScalar>(c: &ComponentSpec<T>) -> Vec<String> {
    match c {
        ComponentSpec::Coupled(inner) => inner.leaves().iter().map(|l| l.id().to_string()).collect(),
        leaf => vec![leaf.id().to_string()],
    }
}

/// Adds the attack simulator to a flattened copy of `spec` and routes every
/// coupling between two intercepted leaves through it. Other couplings are
/// left alone.
pub fn insert_attack_simulator<T: TimeScalar>(
    spec: &CoupledSpec<T>,
    targets: &BTreeSet<String>,
    program: &EffectProgram,
) -> Result<(CoupledSpec<T>, InterceptPlan), AttackError> {
    if spec.find(SIM_ID).is_some() || spec.id == SIM_ID {
        return Err(AttackError::AlreadyInserted);
    }
    let mut leaves = BTreeSet::new();
    for t in targets {
        let c = spec.find(t).ok_or_else(|| AttackError::UnknownTarget(t.clone()))?;
        leaves.extend(leaf_ids(c));
    }
    let mut flat = spec.flatten()?;

    let mut plan = InterceptPlan { targets: leaves, rewired: Vec::new() };
    let mut kept = Vec::new();
    for c in std::mem::take(&mut flat.couplings) {
        let intercepted = c.kind(&flat.id) == CouplingKind::Ic
            && plan.targets.contains(&c.from.component)
            && plan.targets.contains(&c.to.component);
        if !intercepted {
            kept.push(c);
            continue;
        }
        let inp = Endpoint::new(SIM_ID, format!("in_{}_{}", c.from.component, c.from.port));
        let out = Endpoint::new(SIM_ID, format!("out_{}_{}", c.to.component, c.to.port));
        plan.rewired.push(Rewire {
            into_sim: Coupling::new(c.from.clone(), inp),
            out_of_sim: Coupling::new(out, c.to.clone()),
            original: c,
        });
    }
    for e in &program.effects {
        if let Operator::Generate(g) = &e.op {
            if plan.route(&g.from, &g.to).is_none() {
                return Err(AttackError::Unroutable { effect: e.name.clone(), from: g.from.clone(), to: g.to.clone() });
            }
        }
    }

    let mut couplings = kept;
    for r in &plan.rewired {
        couplings.push(r.into_sim.clone());
        couplings.push(r.out_of_sim.clone());
    }
    couplings.sort();
    couplings.dedup();
    flat.couplings = couplings;

    let (inputs, outputs) = plan.ports();
    let shared_plan = Arc::new(plan.clone());
    let shared_prog = Arc::new(program.clone());
    flat.children.push(ComponentSpec::Hosted(HostedSpec {
        id: SIM_ID.to_string(),
        inputs,
        outputs,
        label: "attack simulator".to_string(),
        factory: Arc::new(move || Box::new(Interceptor::<T>::new(shared_plan.clone(), shared_prog.clone()))),
    }));
    flat.children.sort_by(|a, b| a.id().cmp(b.id()));
    Ok((flat, plan))
}
