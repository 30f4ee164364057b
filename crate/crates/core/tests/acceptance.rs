//! One line per acceptance criterion, written straight to stdout so it
//! shows up without `--nocapture`. The test fails if any criterion does.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use cpsfx::attack::{effect_application_count, observable_projection};
use cpsfx::devs::{to_jsonl, EventKind, TraceEvent};
use cpsfx::effects::{format_program, parse_script, EffectProgram};
use cpsfx::process::{
    classify_transition, diff_models, lemma1_witness, theorem1_check, transition, Assignment, Classification,
    Connection, PmError, ProcessModel, StateModel, TheoremOutcome, Variable, VariableSpace,
};
use cpsfx::report::RunReport;
use cpsfx::scenario::{atm_baseline, elevator_baseline, elevator_case, monitor_trace, Scenario, ELEVATOR_FLOORS};
use cpsfx::value::Value;
use cpsfx::Time;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let took = start.elapsed();
    check(took <= limit, || format!("took {:.2}s, limit {}s", took.as_secs_f64(), limit.as_secs()))?;
    Ok(took.as_secs_f64())
}

fn phase_pairs(trace: &[TraceEvent], comp: &str, a: &str, b: &str) -> usize {
    trace
        .iter()
        .filter(|e| e.kind == EventKind::StateChange && e.subject == comp)
        .filter(|e| {
            let get =
                |s: &Option<BTreeMap<String, Value>>| s.as_ref().and_then(|m| m.get("phase")).map(Value::to_string);
            get(&e.detail.old).as_deref() == Some(a) && get(&e.detail.new).as_deref() == Some(b)
        })
        .count()
}

fn motor_pos(s: &Scenario, trace: &[TraceEvent]) -> Value {
    s.final_states(trace)["Motor"]["pos"].clone()
}

fn c1_h5() -> Outcome {
    let start = Instant::now();
    let s = elevator_case(1, 3).map_err(|e| e.to_string())?;
    let h5 = &s.scripts["h5"];
    let trace = s.run(Some(h5), Time::from_integer(200)).map_err(|e| e.to_string())?;
    let pos = motor_pos(&s, &trace);
    let n = effect_application_count(h5, &trace, "H5").map_err(|e| e.to_string())?;
    let car = phase_pairs(&trace, "CarCtrl", "moving", "reached");
    let ctrl = phase_pairs(&trace, "ElevatorCtrl", "movingUP", "stopped");
    let secs = within(Duration::from_secs(1), start)?;
    let summary = format!(
        "final floor {pos}, H5 applied {n}, CarCtrl (moving, reached) x{car}, ElevatorCtrl (movingUP, stopped) x{ctrl}, {secs:.3}s"
    );
    check(pos == Value::Int(1) && n == 2 && car == 2 && ctrl == 2, || summary.clone())?;
    Ok(summary)
}

fn c2_baseline() -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for a in 1..=ELEVATOR_FLOORS {
        for b in 1..=ELEVATOR_FLOORS {
            let s = elevator_case(a, b).map_err(|e| e.to_string())?;
            let trace = s.run(None, Time::from_integer(400)).map_err(|e| e.to_string())?;
            if motor_pos(&s, &trace) != Value::Int(b) {
                wrong.push(format!("{a}->{b}"));
            }
        }
    }
    check(wrong.is_empty(), || format!("wrong final floor for {}", wrong.join(", ")))?;
    let s = elevator_case(1, 3).map_err(|e| e.to_string())?;
    let trace = s.run(None, Time::from_integer(200)).map_err(|e| e.to_string())?;
    check(motor_pos(&s, &trace) == Value::Int(3), || "H5 run without the script does not reach floor 3".into())?;
    let secs = within(Duration::from_secs(5), start)?;
    Ok(format!("25/25 pairs reach dest, H5 case without script reaches floor 3, {secs:.3}s"))
}

fn c3_theorem() -> Outcome {
    let start = Instant::now();
    let mut r = common::rng(301);
    let (mut pmi, mut correct) = (0, 0);
    for i in 0..1000 {
        let c = common::connection(&mut r);
        let outcome = theorem1_check(&c).map_err(|e| format!("case {i}: {e}"))?;
        let f = outcome.finding();
        check(common::oracle_forced_transitions(&c).contains(&f.transition), || format!("case {i}: not forced"))?;
        check(f.is_pmi() == common::oracle_is_pmi(&c, &f.witness.0, &f.witness.1), || {
            format!("case {i}: classification disagrees with the oracle")
        })?;
        let is_pmi = matches!(outcome, TheoremOutcome::PmiInstance { .. });
        check(is_pmi == common::oracle_forced_pmi_exists(&c), || {
            format!("case {i}: outcome disagrees with enumeration")
        })?;
        if is_pmi {
            pmi += 1;
        } else {
            correct += 1;
        }
    }
    let secs = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "1000/1000 agree with brute force ({pmi} PmiInstance, {correct} CorrectlyObservedForcedTransition), {secs:.2}s"
    ))
}

fn c4_lemma() -> Outcome {
    let mut r = common::rng(302);
    let (mut pairs, mut witnesses) = (0, 0);
    for i in 0..1000 {
        let c = common::connection(&mut r);
        let d = diff_models(&c);
        if d.forced_states.is_empty() {
            continue;
        }
        pairs += 1;
        let forced = common::oracle_forced_transitions(&c);
        for s in &d.forced_states {
            let t = lemma1_witness(&c, s).map_err(|e| format!("case {i}: {e}"))?;
            check(forced.contains(&t), || format!("case {i}: {t:?} is not in T_r \\ T_k"))?;
            witnesses += 1;
        }
    }
    check(pairs > 0, || "no generated pair had a forced state".into())?;
    Ok(format!("{witnesses} witnesses over {pairs} pairs with forced states, 0 failures"))
}

fn ints(xs: &[i64]) -> Vec<Value> {
    xs.iter().map(|&x| Value::Int(x)).collect()
}

fn a(xs: &[i64]) -> Assignment {
    Assignment(ints(xs))
}

fn c5_converse() -> Outcome {
    // Two states flipping back and forth in both models; the ground model
    // reads (1, 1) as A while the known model reads v = 1 as B.
    let pk = VariableSpace::new(vec![Variable::new("v", ints(&[0, 1]))]).map_err(|e| e.to_string())?;
    let pr = VariableSpace::new(vec![Variable::new("v", ints(&[0, 1])), Variable::new("w", ints(&[0, 1]))])
        .map_err(|e| e.to_string())?;
    let states: BTreeSet<String> = ["A", "B"].iter().map(|s| s.to_string()).collect();
    let ts: BTreeSet<_> = [transition("A", "B"), transition("B", "A")].into_iter().collect();
    let fk = BTreeMap::from([(a(&[0]), "A".to_string()), (a(&[1]), "B".to_string())]);
    let fr =
        BTreeMap::from([(a(&[0, 0]), "A".to_string()), (a(&[1, 0]), "B".to_string()), (a(&[1, 1]), "A".to_string())]);
    let sm = |s, f| StateModel::new(s, states.clone(), f).map_err(|e| e.to_string());
    let known = ProcessModel::new(sm(pk, fk)?, ts.clone(), Some("A".into())).map_err(|e| e.to_string())?;
    let ground = ProcessModel::new(sm(pr, fr)?, ts, Some("A".into())).map_err(|e| e.to_string())?;
    let c = Connection::new(known, ground, &BTreeMap::from([("w".to_string(), Value::Int(0))]))
        .map_err(|e| e.to_string())?;
    let d = diff_models(&c);
    check(!d.is_incomplete() && !d.is_incorrect(), || "connection is not complete and correct".into())?;
    let f = classify_transition(&c, &a(&[1, 0]), &a(&[1, 1])).map_err(|e| e.to_string())?;
    check(f.classification == Classification::IncorrectlyObserved(transition("B", "B")), || {
        format!("classified {}", f.classification)
    })?;
    check(matches!(theorem1_check(&c), Err(PmError::NotIncomplete)), || "theorem check did not refuse".into())?;
    Ok(format!("complete, correct connection: (B, A) witnessed by (1,0)->(1,1) is {}", f.classification))
}

fn c6_atm() -> Outcome {
    let s = atm_baseline();
    let until = Time::from_integer(100);
    let mut parts = Vec::new();
    for name in ["trapcard", "trapcash"] {
        let trace = s.run(Some(&s.scripts[name]), until).map_err(|e| e.to_string())?;
        let m = monitor_trace(&s, &trace)?;
        let n = m
            .findings
            .iter()
            .filter(|f| matches!(f.finding.classification, Classification::IncorrectlyObserved(_)))
            .count();
        check(n >= 1, || format!("{name}: no IncorrectlyObserved finding"))?;
        parts.push(format!("{name} {n} IncorrectlyObserved"));
    }
    let trace = s.run(Some(&s.scripts["jackpot"]), until).map_err(|e| e.to_string())?;
    let dispensed = trace.iter().any(|e| {
        e.kind == EventKind::StateChange
            && e.subject == "ATM"
            && e.detail.new.as_ref().and_then(|m| m.get("phase")) == Some(&Value::sym("DispenseCash"))
    });
    let rp = trace
        .iter()
        .filter(|e| e.kind == EventKind::StateChange && e.subject == "ATM")
        .filter(|e| e.detail.new.as_ref().and_then(|m| m.get("phase")) == Some(&Value::sym("RequestPassword")))
        .count();
    check(dispensed && rp == 0, || format!("jackpot: dispensed={dispensed}, Request Password entered {rp} times"))?;
    let forced = diff_models(&s.connections["ATM"].connection).forced_states;
    check(forced.len() == 3, || format!("{} forced states", forced.len()))?;
    parts.push(format!("jackpot dispenses with 0 Request Password, {} forced states", forced.len()));
    Ok(parts.join(", "))
}

/// Messages on couplings between the H5 targets, with a field each.
const PATTERNS: &[(&str, &str, &str, &str, &[&str])] = &[
    ("MsgMotor", "CarCtrl", "Motor", "cmd", &["FORWARD", "BACKWARD"]),
    ("MsgMotor", "Motor", "CarCtrl", "cmd", &["REACHED"]),
    ("MsgCar", "ElevatorCtrl", "CarCtrl", "status", &["OPEN", "UP", "DOWN"]),
    ("MsgCar", "CarCtrl", "ElevatorCtrl", "status", &["READYTOMOVE", "REACHED", "ARRIVED"]),
    ("MsgReq", "RequestProc", "ElevatorCtrl", "floor", &["1", "2", "3", "4", "5"]),
    ("MsgBtn", "RequestProc", "ElevatorCtrl", "dest", &["1", "2", "3", "4", "5"]),
];

fn pattern<R: Rng>(r: &mut R) -> String {
    let (ty, from, to, field, vals) = PATTERNS[r.gen_range(0..PATTERNS.len())];
    let mut p = format!("msg {ty} from {from} to {to}");
    if r.gen_bool(0.6) {
        p.push_str(&format!(" where {field} == {}", vals[r.gen_range(0..vals.len())]));
    }
    p
}

fn random_case<R: Rng>(r: &mut R) -> (i64, i64, String, String) {
    let effect = pattern(r);
    let trigger = if r.gen_bool(0.5) { effect.clone() } else { pattern(r) };
    let script = |op: &str| format!("effect E on {effect} {op};\nactivate E on {trigger};\n");
    (r.gen_range(1..=ELEVATOR_FLOORS), r.gen_range(1..=ELEVATOR_FLOORS), script("drop"), script("delay inf"))
}

fn without_operator(trace: &[TraceEvent]) -> String {
    let mut t = trace.to_vec();
    for e in &mut t {
        if e.kind == EventKind::EffectApplied {
            e.detail.operator = None;
        }
    }
    to_jsonl(&t)
}

fn c7_drop_is_infinite_delay() -> Outcome {
    let mut r = common::rng(307);
    let (mut applied_runs, mut total) = (0, 0);
    for i in 0..100 {
        let (a, b, drop, delay) = random_case(&mut r);
        let s = elevator_case(a, b).map_err(|e| e.to_string())?;
        let pd = parse_script(&drop).map_err(|e| format!("case {i}: {e}"))?;
        let pi = parse_script(&delay).map_err(|e| format!("case {i}: {e}"))?;
        let until = Time::from_integer(300);
        let td = s.run(Some(&pd), until).map_err(|e| format!("case {i}: {e}"))?;
        let ti = s.run(Some(&pi), until).map_err(|e| format!("case {i}: {e}"))?;
        check(without_operator(&td) == without_operator(&ti), || format!("case {i} differs:\n{drop}"))?;
        let n = effect_application_count(&pd, &td, "E").map_err(|e| e.to_string())?;
        total += n;
        applied_runs += (n > 0) as usize;
    }
    check(applied_runs > 0, || "no run applied its effect".into())?;
    Ok(format!("100/100 identical; effect applied in {applied_runs} runs ({total} applications)"))
}

fn c8_transparency() -> Outcome {
    let empty = EffectProgram::default();
    for a in 1..=ELEVATOR_FLOORS {
        for b in 1..=ELEVATOR_FLOORS {
            let mut s = elevator_case(a, b).map_err(|e| e.to_string())?;
            s.targets = s.system.leaves().iter().map(|l| l.id().to_string()).collect();
            let until = Time::from_integer(400);
            let base = s.run(None, until).map_err(|e| e.to_string())?;
            let sim = s.run(Some(&empty), until).map_err(|e| e.to_string())?;
            check(observable_projection(&base) == observable_projection(&sim), || format!("{a}->{b} differs"))?;
            check(s.final_states(&base) == s.final_states(&sim), || format!("{a}->{b} final states differ"))?;
        }
    }
    Ok("25/25 baseline cases match with every leaf intercepted by an empty program".into())
}

fn c9_round_trip() -> Outcome {
    let mut r = common::rng(309);
    for i in 0..500 {
        let prog = common::program(&mut r);
        let text = format_program(&prog);
        let back = parse_script(&text).map_err(|e| format!("case {i}: {e}"))?;
        check(back == prog, || format!("case {i} does not round-trip"))?;
    }
    let h5 = &elevator_baseline().scripts["h5"];
    let statements = h5.effects.len() + h5.rules.len();
    check(statements == 4, || format!("h5.fx has {statements} statements"))?;
    Ok(format!("500/500 round-trip; h5.fx has {} effects + {} rule", h5.effects.len(), h5.rules.len()))
}

fn c10_determinism() -> Outcome {
    let mut runs: Vec<(String, Scenario, Option<EffectProgram>)> = Vec::new();
    for a in 1..=ELEVATOR_FLOORS {
        for b in 1..=ELEVATOR_FLOORS {
            let s = elevator_case(a, b).map_err(|e| e.to_string())?;
            runs.push((format!("elevator {a}->{b}"), s.clone(), None));
            runs.push((format!("elevator {a}->{b} h5"), s.clone(), Some(s.scripts["h5"].clone())));
        }
    }
    let atm = atm_baseline();
    runs.push(("atm".into(), atm.clone(), None));
    for (name, p) in &atm.scripts {
        runs.push((format!("atm {name}"), atm.clone(), Some(p.clone())));
    }
    let mut r = common::rng(310);
    for i in 0..20 {
        let (a, b, drop, _) = random_case(&mut r);
        let s = elevator_case(a, b).map_err(|e| e.to_string())?;
        runs.push((format!("random {i}"), s, Some(parse_script(&drop).map_err(|e| e.to_string())?)));
    }
    let until = Time::from_integer(300);
    for (name, s, p) in &runs {
        let once = |_: ()| -> Result<(String, String), String> {
            let t = s.run(p.as_ref(), until).map_err(|e| e.to_string())?;
            let rep = RunReport::from_trace(s, p.as_ref(), &t, None)?;
            Ok((to_jsonl(&t), rep.to_text() + &rep.to_jsonl()))
        };
        let (t1, r1) = once(())?;
        let (t2, r2) = once(())?;
        check(t1 == t2, || format!("{name}: traces differ"))?;
        check(r1 == r2, || format!("{name}: reports differ"))?;
    }
    Ok(format!("{} runs repeated, traces and reports byte-identical (seed {:#x})", runs.len(), common::seed()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("H5 end-to-end", c1_h5),
        ("baseline correctness", c2_baseline),
        ("theorem 1 property suite", c3_theorem),
        ("lemma 1 property suite", c4_lemma),
        ("converse-failure witness", c5_converse),
        ("ATM attacks", c6_atm),
        ("drop equals delay(inf)", c7_drop_is_infinite_delay),
        ("transparency", c8_transparency),
        ("DSL round-trip", c9_round_trip),
        ("determinism", c10_determinism),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let line = match f() {
            Ok(msg) => format!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL  {name}: {msg}", i + 1)
            }
        };
        let _ = writeln!(out, "{line}");
    }
    let _ = out.flush();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
