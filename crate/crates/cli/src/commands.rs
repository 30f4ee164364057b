use std::path::Path;

use cpsfx::devs::{parse_jsonl, to_jsonl};
use cpsfx::effects::{parse_script, validate as check_script, EffectProgram};
use cpsfx::process::{diff_models, lemma1_witness, theorem1_check, PmError, TheoremOutcome};
use cpsfx::report::RunReport;
use cpsfx::scenario::{load_scenario, Scenario};
use cpsfx::Time;

use crate::{Format, EXIT_DATA, EXIT_INTERNAL};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn data(message: impl ToString) -> Failure {
    Failure { code: EXIT_DATA, message: message.to_string() }
}

fn internal(message: impl ToString) -> Failure {
    Failure { code: EXIT_INTERNAL, message: message.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| internal(format!("cannot write {}: {e}", path.display())))
}

fn scenario(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Parses a script and checks it against the scenario; diagnostics are
/// returned as one message.
fn script(s: &Scenario, path: &Path) -> Result<EffectProgram, Failure> {
    let prog = parse_script(&read(path)?).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let diags = check_script(&prog, &s.catalog());
    if diags.is_empty() {
        Ok(prog)
    } else {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
        Err(data(lines.join("\n")))
    }
}

fn emit(report: &RunReport, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let text = match format {
        Format::Text => report.to_text(),
        Format::Jsonl => report.to_jsonl(),
    };
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(
    scenario_path: &Path,
    script_path: Option<&Path>,
    until: Time,
    trace_out: Option<&Path>,
    report_out: Option<&Path>,
    format: Format,
) -> Result<u8, Failure> {
    let s = scenario(scenario_path)?;
    let prog = script_path.map(|p| script(&s, p)).transpose()?;
    let trace = s.run(prog.as_ref(), until).map_err(internal)?;
    if let Some(p) = trace_out {
        write(p, &to_jsonl(&trace))?;
    }
    let trace_path = trace_out.map(|p| p.display().to_string());
    let report = RunReport::from_trace(&s, prog.as_ref(), &trace, trace_path).map_err(internal)?;
    emit(&report, format, report_out)?;
    Ok(report.exit_status as u8)
}

pub fn report(
    scenario_path: &Path,
    trace_path: &Path,
    script_path: Option<&Path>,
    format: Format,
) -> Result<u8, Failure> {
    let s = scenario(scenario_path)?;
    let prog = script_path.map(|p| script(&s, p)).transpose()?;
    let trace = parse_jsonl(&read(trace_path)?).map_err(|e| data(format!("{}: {e}", trace_path.display())))?;
    let report = RunReport::from_trace(&s, prog.as_ref(), &trace, Some(trace_path.display().to_string()))
        .map_err(|e| data(format!("{}: {e}", trace_path.display())))?;
    emit(&report, format, None)?;
    Ok(report.exit_status as u8)
}

pub fn validate(scenario_path: &Path, script_path: &Path) -> Result<u8, Failure> {
    let s = scenario(scenario_path)?;
    script(&s, script_path)?;
    println!("{}: ok", script_path.display());
    Ok(0)
}

fn tuple(vs: &[cpsfx::value::Value]) -> String {
    let parts: Vec<String> = vs.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn set(items: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = items.into_iter().collect();
    if v.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", v.join(", "))
    }
}

pub fn pmi(scenario_path: &Path, component: &str) -> Result<u8, Failure> {
    let s = scenario(scenario_path)?;
    let probe = s
        .connections
        .get(component)
        .ok_or_else(|| data(format!("{}: no connection for component `{component}`", scenario_path.display())))?;
    let c = &probe.connection;
    let d = diff_models(c);
    let pair = |(a, b): &(String, String)| format!("({a}, {b})");

    println!("component: {component}");
    println!("forced states:         {}", set(d.forced_states.iter().cloned()));
    println!("forced transitions:    {}", set(d.forced_transitions.iter().map(pair)));
    println!("incorrect states:      {}", set(d.incorrect_states.iter().cloned()));
    println!("incorrect transitions: {}", set(d.incorrect_transitions.iter().map(pair)));

    if !d.forced_states.is_empty() {
        println!("lemma 1 witnesses:");
        for st in &d.forced_states {
            let t = lemma1_witness(c, st).map_err(internal)?;
            println!("  {st}: {}", pair(&t));
        }
    }
    match theorem1_check(c) {
        Ok(outcome) => {
            let f = outcome.finding();
            let kind = match &outcome {
                TheoremOutcome::PmiInstance { .. } => "PmiInstance",
                TheoremOutcome::CorrectlyObservedForcedTransition { .. } => "CorrectlyObservedForcedTransition",
            };
            println!("theorem 1: {kind} (case {})", outcome.case());
            println!("  transition:     {}", pair(&f.transition));
            println!("  classification: {}", f.classification);
            println!("  witness:        {} -> {}", tuple(&f.witness.0 .0), tuple(&f.witness.1 .0));
        }
        Err(PmError::NotIncomplete) => {
            println!("theorem 1: not applicable, the known model is complete (NotIncomplete)")
        }
        Err(e) => return Err(internal(e)),
    }
    Ok(0)
}
