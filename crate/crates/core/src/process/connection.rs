use std::collections::BTreeMap;

use super::model::{Observation, ProcessModel};
use super::space::Assignment;
use super::PmError;
use crate::value::Value;

/// A known process model connected to a ground-truth model by inclusion
/// (`iota`) and projection (`pi`).
///
/// The ground variables are reordered at construction so that the known
/// variables come first, in the known model's order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    known: ProcessModel,
    ground: ProcessModel,
    defaults: Vec<Value>,
}

impl Connection {
    pub fn new(known: ProcessModel, ground: ProcessModel, defaults: &BTreeMap<String, Value>) -> Result<Self, PmError> {
        let (m, n) = (known.space().arity(), ground.space().arity());
        if n <= m {
            return Err(PmError::GroundNotLarger { known: m, ground: n });
        }
        let mut order = Vec::with_capacity(n);
        for kv in known.space().vars() {
            let i = ground.space().index_of(&kv.name).ok_or_else(|| PmError::MissingSharedVariable(kv.name.clone()))?;
            let gv = &ground.space().vars()[i];
            if let Some(x) = kv.domain.iter().find(|x| !gv.domain.contains(x)) {
                return Err(PmError::DomainNotSubset { var: kv.name.clone(), value: x.clone() });
            }
            order.push(i);
        }
        let rest: Vec<usize> = (0..n).filter(|i| !order.contains(i)).collect();
        order.extend(rest);
        let ground = if order.iter().enumerate().all(|(k, &i)| k == i) { ground } else { ground.permuted(&order)? };

        for name in defaults.keys() {
            if ground.space().index_of(name).is_none_or(|i| i < m) {
                return Err(PmError::UnexpectedDefault(name.clone()));
            }
        }
        let mut fixed = Vec::with_capacity(n - m);
        for v in &ground.space().vars()[m..] {
            let x = defaults.get(&v.name).ok_or_else(|| PmError::MissingDefault(v.name.clone()))?;
            if !v.domain.contains(x) {
                return Err(PmError::ValueOutOfDomain { var: v.name.clone(), value: x.clone() });
            }
            fixed.push(x.clone());
        }
        Ok(Connection { known, ground, defaults: fixed })
    }

    pub fn known(&self) -> &ProcessModel {
        &self.known
    }

    /// The ground model, with variables in canonical order.
    pub fn ground(&self) -> &ProcessModel {
        &self.ground
    }

    pub fn shared_arity(&self) -> usize {
        self.known.space().arity()
    }

    pub fn defaults(&self) -> &[Value] {
        &self.defaults
    }

    /// Inclusion: appends the fixed defaults.
    pub fn iota(&self, p: &Assignment) -> Result<Assignment, PmError> {
        self.known.space().check(p)?;
        Ok(Assignment(p.values().iter().chain(&self.defaults).cloned().collect()))
    }

    /// Projection: positional truncation, defined only when the result lies
    /// in the known space.
    pub fn pi(&self, p: &Assignment) -> Result<Option<Assignment>, PmError> {
        self.ground.space().check(p)?;
        let head = Assignment(p.values()[..self.shared_arity()].to_vec());
        Ok(self.known.space().contains(&head).then_some(head))
    }

    /// How the known model sees a ground assignment.
    pub fn observe_ground_in_known(&self, p: &Assignment) -> Result<Observation, PmError> {
        match self.pi(p)? {
            Some(q) => self.known.observe(&q),
            None => Ok(Observation::Unobservable),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::model::{Row, StateModel};
    use crate::process::space::{Variable, VariableSpace};
    use crate::value::syms;
    use std::collections::BTreeSet;

    fn s(x: &str) -> Option<Value> {
        Some(Value::sym(x))
    }

    fn connection() -> Connection {
        let known_space = VariableSpace::new(vec![
            Variable::new("door", syms(&["CLOSED", "OPEN"])),
            Variable::new("motor", syms(&["ON", "OFF"])),
        ])
        .unwrap();
        let known = StateModel::from_rows(
            known_space,
            None,
            &[Row::new(vec![s("CLOSED"), None], "RUNNING"), Row::new(vec![s("OPEN"), s("OFF")], "STOPPED")],
        )
        .unwrap();
        // ground lists the extra variable first and widens the door domain
        let ground_space = VariableSpace::new(vec![
            Variable::new("aux", vec![Value::Bool(true), Value::Bool(false)]),
            Variable::new("motor", syms(&["ON", "OFF"])),
            Variable::new("door", syms(&["CLOSED", "OPEN", "AJAR"])),
        ])
        .unwrap();
        let ground = StateModel::from_rows(
            ground_space,
            None,
            &[
                Row::new(vec![None, s("ON"), s("OPEN")], "X"),
                Row::new(vec![None, None, s("CLOSED")], "RUNNING"),
                Row::new(vec![None, s("OFF"), s("OPEN")], "STOPPED"),
            ],
        )
        .unwrap();
        let known = ProcessModel::new(known, BTreeSet::new(), None).unwrap();
        let ground = ProcessModel::new(ground, BTreeSet::new(), None).unwrap();
        Connection::new(known, ground, &BTreeMap::from([("aux".to_string(), Value::Bool(true))])).unwrap()
    }

    #[test]
    fn canonical_order_and_roundtrip() {
        let c = connection();
        let names: Vec<_> = c.ground().space().names().collect();
        assert_eq!(names, ["door", "motor", "aux"]);
        for p in c.known().space().assignments() {
            let up = c.iota(&p).unwrap();
            assert_eq!(c.pi(&up).unwrap(), Some(p.clone()));
            assert_eq!(c.observe_ground_in_known(&up).unwrap(), c.known().observe(&p).unwrap());
        }
    }

    #[test]
    fn projection_is_partial() {
        let c = connection();
        let p = Assignment(vec![Value::sym("AJAR"), Value::sym("OFF"), Value::Bool(false)]);
        assert_eq!(c.pi(&p).unwrap(), None);
        assert_eq!(c.observe_ground_in_known(&p).unwrap(), Observation::Unobservable);
        let p = Assignment(vec![Value::sym("OPEN"), Value::sym("OFF"), Value::Bool(false)]);
        assert_eq!(c.observe_ground_in_known(&p).unwrap(), Observation::Observed("STOPPED".into()));
    }

    #[test]
    fn construction_errors() {
        let c = connection();
        let (k, g) = (c.known().clone(), c.ground().clone());
        assert_eq!(
            Connection::new(k.clone(), k.clone(), &BTreeMap::new()),
            Err(PmError::GroundNotLarger { known: 2, ground: 2 })
        );
        assert_eq!(Connection::new(k.clone(), g.clone(), &BTreeMap::new()), Err(PmError::MissingDefault("aux".into())));
        let extra = BTreeMap::from([("aux".to_string(), Value::Bool(true)), ("door".to_string(), Value::sym("OPEN"))]);
        assert_eq!(Connection::new(k.clone(), g.clone(), &extra), Err(PmError::UnexpectedDefault("door".into())));
        let wide = VariableSpace::new(vec![
            Variable::new("door", syms(&["CLOSED", "BROKEN"])),
            Variable::new("motor", syms(&["ON", "OFF"])),
        ])
        .unwrap();
        let wide = StateModel::from_rows(wide, None, &[Row::new(vec![None, None], "A")]).unwrap();
        let wide = ProcessModel::new(wide, BTreeSet::new(), None).unwrap();
        assert_eq!(
            Connection::new(wide, g, &BTreeMap::new()),
            Err(PmError::DomainNotSubset { var: "door".into(), value: Value::sym("BROKEN") })
        );
    }
}
