//! Run reports: what a scenario run did, derived from its trace alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::attack::effect_application_count;
use crate::devs::TraceEvent;
use crate::effects::EffectProgram;
use crate::process::Classification;
use crate::scenario::{monitor_trace, SafetyViolation, Scenario, TimedFinding, Unmodeled};
use crate::value::Value;
use crate::Time;

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_SAFETY: i32 = 2;
pub const EXIT_PMI: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub trace_path: Option<String>,
    pub final_states: BTreeMap<String, BTreeMap<String, Value>>,
    /// Applications per defined effect; empty without a script.
    pub effect_counts: BTreeMap<String, usize>,
    /// Unobservable or incorrectly observed ground transitions.
    pub pmi_findings: Vec<TimedFinding>,
    pub safety_violations: Vec<SafetyViolation>,
    /// Ground-state changes the ground model does not list.
    pub unmodeled: Vec<Unmodeled>,
    pub exit_status: i32,
}

fn ratio(t: Time) -> (i64, i64) {
    (*t.numer(), *t.denom())
}

impl RunReport {
    pub fn from_trace(
        scenario: &Scenario,
        program: Option<&EffectProgram>,
        trace: &[TraceEvent],
        trace_path: Option<String>,
    ) -> Result<Self, String> {
        let monitored = monitor_trace(scenario, trace)?;
        let mut effect_counts = BTreeMap::new();
        if let Some(p) = program {
            for e in &p.effects {
                let n = effect_application_count(p, trace, &e.name).map_err(|e| e.to_string())?;
                effect_counts.insert(e.name.clone(), n);
            }
        }
        let pmi_findings: Vec<_> = monitored.pmi_findings().cloned().collect();
        let exit_status = if !monitored.violations.is_empty() {
            EXIT_SAFETY
        } else if !pmi_findings.is_empty() {
            EXIT_PMI
        } else {
            EXIT_CLEAN
        };
        Ok(RunReport {
            trace_path,
            final_states: scenario.final_states(trace),
            effect_counts,
            pmi_findings,
            safety_violations: monitored.violations,
            unmodeled: monitored.unmodeled,
            exit_status,
        })
    }

    /// Human-readable form with aligned columns.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "trace: {}", self.trace_path.as_deref().unwrap_or("-"));
        let _ = writeln!(out, "exit status: {}", self.exit_status);

        out.push_str("\nfinal states\n");
        let w = self.final_states.keys().map(String::len).max().unwrap_or(0);
        for (comp, vars) in &self.final_states {
            let vs: Vec<String> = vars.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "  {comp:<w$}  {}", vs.join(" "));
        }

        out.push_str("\neffect applications\n");
        if self.effect_counts.is_empty() {
            out.push_str("  (no script)\n");
        }
        let w = self.effect_counts.keys().map(String::len).max().unwrap_or(0);
        for (e, n) in &self.effect_counts {
            let _ = writeln!(out, "  {e:<w$}  {n}");
        }

        let _ = writeln!(out, "\npmi findings: {}", self.pmi_findings.len());
        let rows: Vec<[String; 4]> = self
            .pmi_findings
            .iter()
            .map(|f| {
                let (a, b) = &f.finding.transition;
                let class = match &f.finding.classification {
                    Classification::IncorrectlyObserved((x, y)) => format!("IncorrectlyObserved as ({x}, {y})"),
                    c => c.to_string(),
                };
                [format!("t={}", f.time), f.component.clone(), format!("({a}, {b})"), class]
            })
            .collect();
        table(&mut out, &rows);

        let _ = writeln!(out, "\nsafety violations: {}", self.safety_violations.len());
        let rows: Vec<[String; 4]> = self
            .safety_violations
            .iter()
            .map(|v| {
                [format!("t={}", v.time), v.component.clone(), v.properties.join("; "), assignment(&v.assignment.0)]
            })
            .collect();
        table(&mut out, &rows);

        if !self.unmodeled.is_empty() {
            let _ = writeln!(out, "\nunmodeled ground changes: {}", self.unmodeled.len());
            let name = |s: &Option<String>| s.clone().unwrap_or_else(|| "?".into());
            let rows: Vec<[String; 3]> = self
                .unmodeled
                .iter()
                .map(|u| {
                    [format!("t={}", u.time), u.component.clone(), format!("({}, {})", name(&u.from), name(&u.to))]
                })
                .collect();
            table(&mut out, &rows);
        }
        out
    }

    /// One JSON object per line, timed records with `t_num`/`t_den` like
    /// trace lines.
    pub fn to_jsonl(&self) -> String {
        let mut lines = vec![serde_json::json!({
            "kind": "summary",
            "trace_path": self.trace_path,
            "exit_status": self.exit_status,
            "pmi_findings": self.pmi_findings.len(),
            "safety_violations": self.safety_violations.len(),
            "unmodeled": self.unmodeled.len(),
        })];
        for (comp, state) in &self.final_states {
            lines.push(serde_json::json!({ "kind": "final_state", "subject": comp, "state": state }));
        }
        for (e, n) in &self.effect_counts {
            lines.push(serde_json::json!({ "kind": "effect_count", "effect": e, "count": n }));
        }
        for f in &self.pmi_findings {
            let (t_num, t_den) = ratio(f.time);
            lines.push(serde_json::json!({
                "kind": "pmi_finding", "t_num": t_num, "t_den": t_den, "subject": f.component,
                "transition": f.finding.transition, "witness": f.finding.witness,
                "classification": f.finding.classification,
            }));
        }
        for v in &self.safety_violations {
            let (t_num, t_den) = ratio(v.time);
            lines.push(serde_json::json!({
                "kind": "safety_violation", "t_num": t_num, "t_den": t_den, "subject": v.component,
                "properties": v.properties, "assignment": v.assignment,
            }));
        }
        for u in &self.unmodeled {
            let (t_num, t_den) = ratio(u.time);
            lines.push(serde_json::json!({
                "kind": "unmodeled", "t_num": t_num, "t_den": t_den, "subject": u.component,
                "from": u.from, "to": u.to,
            }));
        }
        let mut out = String::new();
        for l in lines {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

fn assignment(vs: &[Value]) -> String {
    let parts: Vec<String> = vs.iter().map(Value::to_string).collect();
    format!("({})", parts.join(", "))
}

fn table<const N: usize>(out: &mut String, rows: &[[String; N]]) {
    let mut widths = [0; N];
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    for r in rows {
        out.push(' ');
        for (i, (w, c)) in widths.iter().zip(r).enumerate() {
            if i + 1 == N {
                let _ = write!(out, " {c}");
            } else {
                let _ = write!(out, " {c:<w$}");
            }
        }
        out.push('\n');
    }
}
