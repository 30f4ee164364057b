//! Seeded generators and brute-force oracles shared by the integration
//! tests. Every generator draws from a ChaCha stream seeded by `CPSFX_SEED`.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cpsfx::effects::{ActivationRule, EffectDef, EffectProgram, Generate, Operator, Pattern, RuleKind};
use cpsfx::expr::{ArithOp, CmpOp, Expr, Literal};
use cpsfx::lexer::Pos;
use cpsfx::process::{Assignment, Connection, ProcessModel, StateModel, Transition, Variable, VariableSpace};
use cpsfx::value::Value;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

pub fn seed() -> u64 {
    std::env::var("CPSFX_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// Independent stream per test, derived from the global seed.
pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

// ---------------------------------------------------------------- programs

const COMPONENTS: &[&str] = &["CarCtrl", "Motor", "ElevatorCtrl", "ATM", "Customer"];
const TYPES: &[&str] = &["MsgMotor", "MsgCar", "MsgCard"];
const FIELDS: &[&str] = &["cmd", "pos", "dest", "kind"];
const SYMBOLS: &[&str] = &["FORWARD", "REACHED", "OPEN", "INSERT"];

fn pick<'a, R: Rng>(r: &mut R, xs: &[&'a str]) -> &'a str {
    xs[r.gen_range(0..xs.len())]
}

fn literal<R: Rng>(r: &mut R) -> Literal {
    match r.gen_range(0..4) {
        0 => Literal::Int(r.gen_range(-50..50)),
        1 => Literal::Bool(r.gen()),
        2 => Literal::Str(pick(r, SYMBOLS).to_string()),
        _ => Literal::Str(["two words", "quote\"d", "back\\slash", "line\nbreak", ""][r.gen_range(0..5)].to_string()),
    }
}

fn operand<R: Rng>(r: &mut R, dotted: bool) -> Expr {
    match r.gen_range(0..5) {
        0 => Expr::Lit(literal(r), Pos::default()),
        1 => Expr::name(pick(r, SYMBOLS)),
        2 if dotted => Expr::name(&format!("{}.{}", pick(r, TYPES), pick(r, FIELDS))),
        3 => Expr::name("time"),
        4 => Expr::Arith(
            if r.gen() { ArithOp::Add } else { ArithOp::Sub },
            Box::new(Expr::name(pick(r, FIELDS))),
            Box::new(Expr::int(r.gen_range(-5..20))),
        ),
        _ => Expr::name(pick(r, FIELDS)),
    }
}

pub fn expr<R: Rng>(r: &mut R, depth: u32, dotted: bool) -> Expr {
    if depth == 0 || r.gen_bool(0.3) {
        let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge];
        let op = ops[r.gen_range(0..ops.len())];
        return match r.gen_range(0..6) {
            0 => Expr::name(pick(r, FIELDS)),
            1 => Expr::bool(r.gen()),
            _ => Expr::cmp(op, operand(r, dotted), operand(r, dotted)),
        };
    }
    match r.gen_range(0..3) {
        0 => Expr::and(expr(r, depth - 1, dotted), expr(r, depth - 1, dotted)),
        1 => Expr::or(expr(r, depth - 1, dotted), expr(r, depth - 1, dotted)),
        _ => Expr::not(expr(r, depth - 1, dotted)),
    }
}

fn pattern<R: Rng>(r: &mut R) -> Pattern {
    let filter = r.gen_bool(0.7).then(|| expr(r, 3, false));
    Pattern::new(pick(r, TYPES), pick(r, COMPONENTS), pick(r, COMPONENTS), filter)
}

fn setlist<R: Rng>(r: &mut R) -> Vec<(String, Literal, Pos)> {
    (0..r.gen_range(1..4)).map(|_| (pick(r, FIELDS).to_string(), literal(r), Pos::default())).collect()
}

/// A syntactically valid program: unique names, chains over earlier
/// effects only.
pub fn program<R: Rng>(r: &mut R) -> EffectProgram {
    let mut prog = EffectProgram::default();
    for i in 0..r.gen_range(0..6) {
        let name = format!("E{i}");
        let def = if i >= 1 && r.gen_bool(0.25) {
            let k = r.gen_range(1..=i.min(3));
            let members = (0..k).map(|_| (format!("E{}", r.gen_range(0..i)), Pos::default())).collect();
            EffectDef { name, trigger: None, op: Operator::Chain(members), pos: Pos::default() }
        } else {
            let op = match r.gen_range(0..5) {
                0 => Operator::Generate(Generate {
                    msg_type: pick(r, TYPES).into(),
                    from: pick(r, COMPONENTS).into(),
                    to: pick(r, COMPONENTS).into(),
                    set: setlist(r),
                    spans: [Pos::default(); 3],
                }),
                1 => Operator::drop(),
                2 => Operator::delay(Some(r.gen_range(0..100))),
                3 => Operator::delay(None),
                _ => Operator::Modify(setlist(r)),
            };
            EffectDef { name, trigger: Some(pattern(r)), op, pos: Pos::default() }
        };
        prog.effects.push(def);
    }
    for _ in 0..r.gen_range(0..4) {
        let effect = if prog.effects.is_empty() || r.gen_bool(0.1) {
            "Missing".to_string()
        } else {
            prog.effects[r.gen_range(0..prog.effects.len())].name.clone()
        };
        prog.rules.push(ActivationRule {
            kind: if r.gen() { RuleKind::Activate } else { RuleKind::Deactivate },
            effect,
            effect_pos: Pos::default(),
            trigger: pattern(r),
            given: r.gen_bool(0.5).then(|| expr(r, 2, true)),
            pos: Pos::default(),
        });
    }
    prog
}

// ------------------------------------------------------------- connections

fn build_model(
    space: VariableSpace,
    table: BTreeMap<Assignment, String>,
    states: BTreeSet<String>,
    transitions: BTreeSet<Transition>,
    initial: Option<String>,
) -> ProcessModel {
    let sm = StateModel::new(space, states, table).expect("generator keeps F surjective");
    ProcessModel::new(sm, transitions, initial).expect("generator keeps T inside S")
}

/// A random connected pair over at most 4 variables of at most 3 values and
/// at most 8 ground states. The ground model is always reachable from `s0`
/// and the known model is always incomplete.
pub fn connection<R: Rng>(r: &mut R) -> Connection {
    let n = r.gen_range(2..=4);
    let m = r.gen_range(1..n);
    let mut ground_vars = Vec::new();
    let mut known_vars = Vec::new();
    for i in 0..n {
        let size = r.gen_range(1..=3);
        let domain: Vec<Value> = (0..size).map(Value::Int).collect();
        if i < m {
            let k = r.gen_range(1..=size);
            known_vars.push(Variable::new(format!("v{i}"), domain[..k as usize].to_vec()));
        }
        ground_vars.push(Variable::new(format!("v{i}"), domain));
    }
    let pr = VariableSpace::new(ground_vars).unwrap();
    let pk = VariableSpace::new(known_vars).unwrap();
    let mut all_r: Vec<Assignment> = pr.assignments().collect();

    // ground states, each with at least one preimage
    let s_count = r.gen_range(2..=8usize).min(all_r.len().max(2));
    let names: Vec<String> = (0..s_count).map(|i| format!("s{i}")).collect();
    all_r.shuffle(r);
    if all_r.len() < 2 {
        // a one-point space cannot carry two states; widen a ground-only variable
        return connection(r);
    }
    let mut fr = BTreeMap::new();
    for (i, p) in all_r.iter().enumerate() {
        if i < s_count {
            fr.insert(p.clone(), names[i].clone());
        } else if r.gen_bool(0.8) {
            fr.insert(p.clone(), names[r.gen_range(0..s_count)].clone());
        }
    }
    let sr: BTreeSet<String> = names.iter().cloned().collect();

    // reachable transition relation: a random spanning tree plus extras
    let mut tr = BTreeSet::new();
    let mut order = names[1..].to_vec();
    order.shuffle(r);
    let mut reached = vec![names[0].clone()];
    for s in order {
        let from = reached[r.gen_range(0..reached.len())].clone();
        tr.insert((from, s.clone()));
        reached.push(s);
    }
    for _ in 0..r.gen_range(0..6) {
        tr.insert((names[r.gen_range(0..s_count)].clone(), names[r.gen_range(0..s_count)].clone()));
    }

    // known model
    let all_k: Vec<Assignment> = pk.assignments().collect();
    let mut sk: BTreeSet<String> = names.iter().filter(|_| r.gen_bool(0.7)).cloned().collect();
    if r.gen_bool(0.15) {
        sk.insert("k_extra".into());
    }
    if sk.is_empty() {
        sk.insert(names[0].clone());
    }
    while sk.len() > all_k.len() {
        let last = sk.iter().next_back().unwrap().clone();
        sk.remove(&last);
    }
    let sk_list: Vec<String> = sk.iter().cloned().collect();
    let correlated = r.gen_bool(0.5);
    let mut shuffled_k = all_k.clone();
    shuffled_k.shuffle(r);
    let mut fk = BTreeMap::new();
    for (i, p) in shuffled_k.iter().enumerate() {
        if i < sk_list.len() {
            fk.insert(p.clone(), sk_list[i].clone());
            continue;
        }
        if correlated {
            let mut up = p.0.clone();
            up.extend((m..n).map(|_| Value::Int(0)));
            if let Some(s) = fr.get(&Assignment(up)).filter(|s| sk.contains(*s)) {
                fk.insert(p.clone(), s.clone());
                continue;
            }
        }
        if r.gen_bool(0.7) {
            fk.insert(p.clone(), sk_list[r.gen_range(0..sk_list.len())].clone());
        }
    }
    let mut tk: BTreeSet<Transition> =
        tr.iter().filter(|(a, b)| sk.contains(a) && sk.contains(b) && r.gen_bool(0.7)).cloned().collect();
    if r.gen_bool(0.2) {
        tk.insert((sk_list[0].clone(), sk_list[sk_list.len() - 1].clone()));
    }
    // enforce incompleteness
    if sr.is_subset(&sk) && tr.is_subset(&tk) {
        let victim = tr.iter().nth(r.gen_range(0..tr.len())).unwrap().clone();
        tk.remove(&victim);
    }

    let defaults: BTreeMap<String, Value> = (m..n).map(|i| (format!("v{i}"), Value::Int(0))).collect();
    let known_initial = sk.contains(&names[0]).then(|| names[0].clone());
    let known = build_model(pk, fk, sk, tk, known_initial);
    let ground = build_model(pr, fr, sr, tr, Some(names[0].clone()));
    Connection::new(known, ground, &defaults).expect("generator respects connection rules")
}

// ----------------------------------------------------------------- oracles

/// How the known model reads a ground assignment, computed from the raw
/// tables: truncate, check known domains, look up `F_k`.
pub fn oracle_read(c: &Connection, p: &Assignment) -> Option<String> {
    let m = c.known().space().arity();
    let head: Vec<Value> = p.0[..m].to_vec();
    for (v, x) in c.known().space().vars().iter().zip(&head) {
        if !v.domain.contains(x) {
            return None;
        }
    }
    c.known().state_model().table().get(&Assignment(head)).cloned()
}

/// Is the witness pair unobservable or incorrectly observed?
pub fn oracle_is_pmi(c: &Connection, pa: &Assignment, pb: &Assignment) -> bool {
    let fr = c.ground().state_model().table();
    match (oracle_read(c, pa), oracle_read(c, pb)) {
        (Some(a), Some(b)) => Some(&a) != fr.get(pa) || Some(&b) != fr.get(pb),
        _ => true,
    }
}

pub fn oracle_forced_transitions(c: &Connection) -> BTreeSet<Transition> {
    c.ground().transitions().iter().filter(|t| !c.known().transitions().contains(*t)).cloned().collect()
}

/// Enumerates `P_r x P_r` and reports whether any witness of any forced
/// transition is a PMI witness.
pub fn oracle_forced_pmi_exists(c: &Connection) -> bool {
    let forced = oracle_forced_transitions(c);
    let fr = c.ground().state_model().table();
    let all: Vec<Assignment> = c.ground().space().assignments().collect();
    for pa in &all {
        for pb in &all {
            if let (Some(a), Some(b)) = (fr.get(pa), fr.get(pb)) {
                if forced.contains(&(a.clone(), b.clone())) && oracle_is_pmi(c, pa, pb) {
                    return true;
                }
            }
        }
    }
    false
}
