use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::model::StateModel;
use super::space::{Assignment, VariableSpace};
use super::PmError;
use crate::expr::Expr;
use crate::value::Value;

/// A named boolean predicate over a ground variable space.
#[derive(Clone, Debug, PartialEq)]
pub struct SafetyProperty {
    name: String,
    expr: Expr,
    space: VariableSpace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Normal,
    Bad(Vec<String>),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Normal => f.write_str("Normal"),
            Verdict::Bad(names) => write!(f, "Bad({})", names.join(", ")),
        }
    }
}

impl SafetyProperty {
    /// Checks that the predicate only names variables or domain values, is
    /// boolean on every assignment, and agrees on assignments observed as
    /// the same state.
    pub fn new(name: impl Into<String>, expr: Expr, model: &StateModel) -> Result<Self, PmError> {
        let name = name.into();
        let space = model.space().clone();
        let bad = |reason: String| PmError::BadSafetyProperty { name: name.clone(), reason };
        for (path, pos) in expr.names() {
            let known = match path {
                [single] => {
                    space.index_of(single).is_some()
                        || space.vars().iter().any(|v| v.domain.contains(&Value::sym(single.as_str())))
                }
                _ => false,
            };
            if !known {
                return Err(bad(format!("{pos}: unknown name `{}`", path.join("."))));
            }
        }
        let prop = SafetyProperty { name: name.clone(), expr, space };
        let mut seen: BTreeMap<&str, (&Assignment, bool)> = BTreeMap::new();
        for p in prop.space.assignments() {
            prop.evaluate(&p).map_err(|e| bad(format!("at {p}: {e}")))?;
        }
        for (p, s) in model.table() {
            let v = prop.evaluate(p)?;
            match seen.get(s.as_str()) {
                Some(&(q, w)) if w != v => {
                    return Err(PmError::InconsistentSafety { name, state: s.clone(), a: q.clone(), b: p.clone() })
                }
                Some(_) => {}
                None => {
                    seen.insert(s, (p, v));
                }
            }
        }
        Ok(prop)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn evaluate(&self, p: &Assignment) -> Result<bool, PmError> {
        self.space.check(p)?;
        let env = |path: &[String]| match path {
            [single] => self.space.index_of(single).map(|i| p.values()[i].clone()),
            _ => None,
        };
        self.expr
            .eval_bool(&env)
            .map_err(|e| PmError::BadSafetyProperty { name: self.name.clone(), reason: e.to_string() })
    }
}

/// `Bad` with the violated property names, in list order, if any fails.
pub fn evaluate_safety(props: &[SafetyProperty], p: &Assignment) -> Result<Verdict, PmError> {
    let mut violated = Vec::new();
    for prop in props {
        if !prop.evaluate(p)? {
            violated.push(prop.name.clone());
        }
    }
    Ok(if violated.is_empty() { Verdict::Normal } else { Verdict::Bad(violated) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::model::Row;
    use crate::process::space::Variable;
    use crate::value::syms;

    fn s(x: &str) -> Option<Value> {
        Some(Value::sym(x))
    }

    fn ground() -> StateModel {
        let space = VariableSpace::new(vec![
            Variable::new("statusCarDoor", syms(&["CLOSED", "OPEN"])),
            Variable::new("motorRunning", syms(&["ON", "OFF"])),
            Variable::new("inPlace", vec![Value::Bool(true), Value::Bool(false)]),
        ])
        .unwrap();
        StateModel::from_rows(
            space,
            None,
            &[
                Row::new(vec![s("OPEN"), s("ON"), None], "X"),
                Row::new(vec![s("CLOSED"), None, None], "RUNNING"),
                Row::new(vec![s("OPEN"), s("OFF"), None], "STOPPED"),
            ],
        )
        .unwrap()
    }

    fn door_rule(sm: &StateModel) -> SafetyProperty {
        let e = Expr::parse("not (statusCarDoor == OPEN and motorRunning == ON)").unwrap();
        SafetyProperty::new("door closed while moving", e, sm).unwrap()
    }

    #[test]
    fn open_and_running_is_bad() {
        let sm = ground();
        let props = [door_rule(&sm)];
        let p = Assignment(vec![Value::sym("OPEN"), Value::sym("ON"), Value::Bool(true)]);
        assert_eq!(evaluate_safety(&props, &p).unwrap(), Verdict::Bad(vec!["door closed while moving".into()]));
        assert_eq!(evaluate_safety(&[], &p).unwrap(), Verdict::Normal);
        for p in sm.space().assignments().filter(|p| p.values()[0] == Value::sym("CLOSED")) {
            assert_eq!(evaluate_safety(&props, &p).unwrap(), Verdict::Normal);
        }
    }

    #[test]
    fn inconsistent_predicate_rejected() {
        let sm = ground();
        let e = Expr::parse("inPlace").unwrap();
        assert!(matches!(SafetyProperty::new("p", e, &sm), Err(PmError::InconsistentSafety { .. })));
    }

    #[test]
    fn non_boolean_and_unknown_names_rejected() {
        let sm = ground();
        let e = Expr::parse("statusCarDoor").unwrap();
        assert!(matches!(SafetyProperty::new("p", e, &sm), Err(PmError::BadSafetyProperty { .. })));
        let e = Expr::parse("motorRuning == ON").unwrap();
        assert!(matches!(SafetyProperty::new("p", e, &sm), Err(PmError::BadSafetyProperty { .. })));
    }
}
