use std::fmt;

use serde::{Deserialize, Serialize};

use super::PmError;
use crate::value::Value;

/// One state variable and its finite value domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<Value>,
}

impl Variable {
    pub fn new(name: impl Into<String>, domain: Vec<Value>) -> Self {
        Variable { name: name.into(), domain }
    }
}

/// An ordered multivariable and its product space of assignments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpace {
    vars: Vec<Variable>,
}

/// A value tuple, positionally aligned with a [`VariableSpace`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<Value>);

impl Assignment {
    pub fn new(values: Vec<Value>) -> Self {
        Assignment(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl VariableSpace {
    pub fn new(vars: Vec<Variable>) -> Result<Self, PmError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(PmError::DuplicateVariable(v.name.clone()));
            }
            if v.domain.is_empty() {
                return Err(PmError::EmptyDomain(v.name.clone()));
            }
            for (j, x) in v.domain.iter().enumerate() {
                if v.domain[..j].contains(x) {
                    return Err(PmError::DuplicateDomainValue(v.name.clone(), x.clone()));
                }
            }
        }
        Ok(VariableSpace { vars })
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    /// Number of assignments in the product space.
    pub fn size(&self) -> usize {
        self.vars.iter().map(|v| v.domain.len()).product()
    }

    pub fn check(&self, p: &Assignment) -> Result<(), PmError> {
        if p.arity() != self.arity() {
            return Err(PmError::ArityMismatch { expected: self.arity(), got: p.arity() });
        }
        for (v, x) in self.vars.iter().zip(p.values()) {
            if !v.domain.contains(x) {
                return Err(PmError::ValueOutOfDomain { var: v.name.clone(), value: x.clone() });
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Assignment) -> bool {
        self.check(p).is_ok()
    }

    /// All assignments in lexicographic order of domain positions.
    pub fn assignments(&self) -> Assignments<'_> {
        Assignments { space: self, idx: vec![0; self.arity()], done: false }
    }

    /// Assignment from named values; every variable must be given.
    pub fn assignment_from<'a>(&self, mut get: impl FnMut(&str) -> Option<&'a Value>) -> Result<Assignment, PmError> {
        let mut out = Vec::with_capacity(self.arity());
        for v in &self.vars {
            let x = get(&v.name).ok_or_else(|| PmError::MissingVariable(v.name.clone()))?;
            out.push(x.clone());
        }
        let p = Assignment(out);
        self.check(&p)?;
        Ok(p)
    }
}

pub struct Assignments<'a> {
    space: &'a VariableSpace,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for Assignments<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        let vars = &self.space.vars;
        let item = Assignment(self.idx.iter().zip(vars).map(|(&i, v)| v.domain[i].clone()).collect());
        // odometer increment, last variable fastest
        let mut k = vars.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < vars[k].domain.len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::syms;

    fn car() -> VariableSpace {
        VariableSpace::new(vec![
            Variable::new("statusCarDoor", syms(&["CLOSED", "OPEN"])),
            Variable::new("motorRunning", syms(&["ON", "OFF"])),
        ])
        .unwrap()
    }

    #[test]
    fn enumerates_product() {
        let s = car();
        let all: Vec<_> = s.assignments().collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[1], Assignment(syms(&["CLOSED", "OFF"])));
        assert_eq!(all.iter().collect::<std::collections::BTreeSet<_>>().len(), 4);
    }

    #[test]
    fn zero_arity_space_has_one_assignment() {
        let s = VariableSpace::new(vec![]).unwrap();
        assert_eq!(s.assignments().count(), 1);
    }

    #[test]
    fn rejects_bad_spaces_and_assignments() {
        assert!(matches!(VariableSpace::new(vec![Variable::new("a", vec![])]), Err(PmError::EmptyDomain(_))));
        assert!(matches!(
            VariableSpace::new(vec![Variable::new("a", syms(&["X"])), Variable::new("a", syms(&["Y"]))]),
            Err(PmError::DuplicateVariable(_))
        ));
        let s = car();
        assert!(matches!(s.check(&Assignment(syms(&["OPEN"]))), Err(PmError::ArityMismatch { .. })));
        assert!(matches!(s.check(&Assignment(syms(&["AJAR", "ON"]))), Err(PmError::ValueOutOfDomain { .. })));
    }
}
