//! ATM: one controller and a scripted customer. Verification is stubbed:
//! the customer's PIN message says whether the PIN is right, and the
//! account check takes one tick.
//!
//! The ground truth adds three states the controller cannot represent:
//! Trap Card (the eject never reached the customer), Trap Cash (the
//! dispense never reached the customer) and Activate Malware.

use std::collections::BTreeMap;

use super::file::{build_probe, bundled_script, driver_message, process_model};
use super::{MessageTypes, Scenario};
use crate::devs::{AtomicBuilder, ComponentSpec, CoupledSpec, Coupling, EmitSrc, Endpoint};
use crate::process::Variable;
use crate::time::Span;
use crate::value::{syms, Value};
use crate::Time;

const TRAPCASH: &str = include_str!("../../../../scenarios/trapcash.fx");
const TRAPCARD: &str = include_str!("../../../../scenarios/trapcard.fx");
const JACKPOT: &str = include_str!("../../../../scenarios/jackpot.fx");

/// Controller phase symbols paired with the state names of the models.
const PHASES: &[(&str, &str)] = &[
    ("InsertReadableCard", "Insert Readable Card"),
    ("RequestPassword", "Request Password"),
    ("VerifyAccount", "Verify Account"),
    ("ProcessTransaction", "Process Transaction"),
    ("DispenseCash", "Dispense Cash"),
    ("AnotherTransaction", "Another Transaction"),
    ("PrintReceipt", "Print Receipt"),
    ("EjectCard", "Eject Card"),
    ("WrongPIN", "Wrong PIN"),
];

const KNOWN_TS: &[&str] = &[
    "Insert Readable Card -> Request Password",
    "Request Password -> Verify Account",
    "Verify Account -> Process Transaction",
    "Verify Account -> Wrong PIN",
    "Wrong PIN -> Print Receipt",
    "Process Transaction -> Dispense Cash",
    "Dispense Cash -> Another Transaction",
    "Another Transaction -> Process Transaction",
    "Another Transaction -> Print Receipt",
    "Print Receipt -> Eject Card",
    "Eject Card -> Insert Readable Card",
];

const FORCED_TS: &[&str] = &[
    "Dispense Cash -> Trap Cash",
    "Trap Cash -> Process Transaction",
    "Trap Cash -> Print Receipt",
    "Print Receipt -> Trap Card",
    "Trap Card -> Insert Readable Card",
    "Insert Readable Card -> Activate Malware",
    "Activate Malware -> Dispense Cash",
];

fn tick() -> Span<Time> {
    Span::ticks(1)
}

fn bools() -> Vec<Value> {
    vec![false.into(), true.into()]
}

fn phase_syms(with_malware: bool) -> Vec<Value> {
    let mut v: Vec<&str> = PHASES.iter().map(|(p, _)| *p).collect();
    if with_malware {
        v.push("ActivateMalware");
    }
    syms(&v)
}

fn atm() -> ComponentSpec {
    let dispense: &[EmitSrc] = &[("out", "MsgCash", &[("action", "DISPENSE")])];
    AtomicBuilder::new("ATM")
        .inputs(&["in"])
        .outputs(&["out"])
        .var("phase", phase_syms(true), "InsertReadableCard")
        .var("prompted", bools(), false)
        .var("pinOk", bools(), false)
        .var("dispensed", bools(), false)
        .var("ejected", bools(), false)
        .internal(
            "phase == RequestPassword and not prompted",
            tick(),
            &[("out", "MsgPrompt", &[("what", "PIN")])],
            &[("prompted", "true")],
        )
        .internal("phase == VerifyAccount and pinOk", tick(), &[], &[("phase", "ProcessTransaction")])
        .internal("phase == VerifyAccount and not pinOk", tick(), &[], &[("phase", "WrongPIN")])
        .internal("phase == WrongPIN", tick(), &[], &[("phase", "PrintReceipt")])
        .internal("phase == ProcessTransaction", tick(), dispense, &[("phase", "DispenseCash"), ("dispensed", "true")])
        .internal("phase == ActivateMalware", tick(), dispense, &[("phase", "DispenseCash"), ("dispensed", "true")])
        .internal(
            "phase == DispenseCash",
            tick(),
            &[("out", "MsgPrompt", &[("what", "ANOTHER")])],
            &[("phase", "AnotherTransaction")],
        )
        .internal(
            "phase == PrintReceipt",
            tick(),
            &[("out", "MsgCard", &[("kind", "EJECT")])],
            &[("phase", "EjectCard"), ("ejected", "true")],
        )
        .internal("phase == EjectCard", tick(), &[], &[("phase", "InsertReadableCard")])
        .external(
            "in",
            "MsgCard",
            "msg.kind == INSERT and phase == InsertReadableCard",
            &[("phase", "RequestPassword"), ("prompted", "false"), ("dispensed", "false"), ("ejected", "false")],
        )
        .external(
            "in",
            "MsgCard",
            "msg.kind == MALWARE and phase == InsertReadableCard",
            &[("phase", "ActivateMalware"), ("dispensed", "false"), ("ejected", "false")],
        )
        .external(
            "in",
            "MsgPin",
            "phase == RequestPassword",
            &[("phase", "VerifyAccount"), ("pinOk", "msg.ok"), ("prompted", "false")],
        )
        .external("in", "MsgAnswer", "phase == AnotherTransaction and msg.more", &[("phase", "ProcessTransaction")])
        .external("in", "MsgAnswer", "phase == AnotherTransaction and not msg.more", &[("phase", "PrintReceipt")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("ATM")
}

/// Inserts the card when told to, types a PIN when prompted, takes cash and
/// card when they arrive, and declines another transaction, but only once
/// it actually holds the cash.
fn customer() -> ComponentSpec {
    AtomicBuilder::new("Customer")
        .inputs(&["go", "in"])
        .outputs(&["out"])
        .var("todo", syms(&["NONE", "INSERT", "PIN", "ANSWER"]), "NONE")
        .var("card", syms(&["HELD", "INATM"]), "HELD")
        .var("cash", syms(&["NONE", "HELD"]), "NONE")
        .var("pinOk", bools(), true)
        .internal(
            "todo == INSERT",
            tick(),
            &[("out", "MsgCard", &[("kind", "INSERT")])],
            &[("todo", "NONE"), ("card", "INATM")],
        )
        .internal("todo == PIN", tick(), &[("out", "MsgPin", &[("ok", "pinOk")])], &[("todo", "NONE")])
        .internal("todo == ANSWER", tick(), &[("out", "MsgAnswer", &[("more", "false")])], &[("todo", "NONE")])
        .external("go", "MsgCard", "msg.kind == INSERT and card == HELD", &[("todo", "INSERT")])
        .external("in", "MsgPrompt", "msg.what == PIN", &[("todo", "PIN")])
        .external("in", "MsgPrompt", "msg.what == ANOTHER and cash == HELD", &[("todo", "ANSWER")])
        .external("in", "MsgCash", "msg.action == DISPENSE", &[("cash", "HELD")])
        .external("in", "MsgCard", "msg.kind == EJECT", &[("card", "HELD")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("Customer")
}

fn c(from: &str, to: &str) -> Coupling {
    Coupling::new(Endpoint::parse(from).expect("endpoint"), Endpoint::parse(to).expect("endpoint"))
}

fn message_types() -> MessageTypes {
    let one = |f: &str, d: Vec<Value>| BTreeMap::from([(f.to_string(), d)]);
    MessageTypes::from([
        ("MsgCard".to_string(), one("kind", syms(&["INSERT", "EJECT", "MALWARE"]))),
        ("MsgPrompt".to_string(), one("what", syms(&["PIN", "ANOTHER"]))),
        ("MsgPin".to_string(), one("ok", bools())),
        ("MsgCash".to_string(), one("action", syms(&["DISPENSE"]))),
        ("MsgAnswer".to_string(), one("more", bools())),
    ])
}

pub fn atm_baseline() -> Scenario {
    let system = CoupledSpec {
        id: "AtmSite".into(),
        inputs: vec!["customer".into()],
        outputs: vec![],
        children: vec![atm(), customer()],
        couplings: vec![c("AtmSite.customer", "Customer.go"), c("Customer.out", "ATM.in"), c("ATM.out", "Customer.in")],
    };
    let message_types = message_types();
    let drivers =
        vec![driver_message(&system, &message_types, Time::from_integer(1), "customer", "MsgCard", &["kind = INSERT"])
            .expect("driver")];

    let known_rows: Vec<String> = PHASES.iter().map(|(p, s)| format!("{p} -> {s}")).collect();
    let known_rows: Vec<&str> = known_rows.iter().map(String::as_str).collect();
    let known = process_model(
        vec![Variable::new("phase", phase_syms(false))],
        &known_rows,
        KNOWN_TS,
        Some("Insert Readable Card"),
    )
    .expect("known ATM model");

    let mut ground_rows = vec![
        "ActivateMalware, *, * -> Activate Malware".to_string(),
        "AnotherTransaction, true, * -> Trap Cash".to_string(),
        "EjectCard, *, true -> Trap Card".to_string(),
    ];
    ground_rows.extend(PHASES.iter().map(|(p, s)| format!("{p}, *, * -> {s}")));
    let ground_rows: Vec<&str> = ground_rows.iter().map(String::as_str).collect();
    let ground_ts: Vec<&str> = KNOWN_TS.iter().chain(FORCED_TS).copied().collect();
    let ground = process_model(
        vec![
            Variable::new("phase", phase_syms(true)),
            Variable::new("cashLost", bools()),
            Variable::new("cardLost", bools()),
        ],
        &ground_rows,
        &ground_ts,
        Some("Insert Readable Card"),
    )
    .expect("ground ATM model");
    let probe = build_probe(
        &system,
        known.clone(),
        ground.clone(),
        &["cashLost = false", "cardLost = false"],
        &[
            "phase = ATM.phase",
            "cashLost = ATM.dispensed and Customer.cash == NONE",
            "cardLost = ATM.ejected and Customer.card == INATM",
        ],
    )
    .expect("probe");

    let mut s = Scenario {
        system,
        message_types,
        drivers,
        known_models: BTreeMap::from([("ATM".to_string(), known)]),
        ground_models: BTreeMap::from([("ATM".to_string(), ground)]),
        connections: BTreeMap::from([("ATM".to_string(), probe)]),
        safety: vec![],
        scripts: BTreeMap::from([
            ("jackpot".to_string(), bundled_script(JACKPOT)),
            ("trapcard".to_string(), bundled_script(TRAPCARD)),
            ("trapcash".to_string(), bundled_script(TRAPCASH)),
        ]),
        targets: ["ATM", "Customer"].iter().map(|t| t.to_string()).collect(),
    };
    s.normalize();
    s
}
