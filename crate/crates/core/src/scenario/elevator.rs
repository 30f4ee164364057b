//! Five-floor elevator: an elevator controller, a request processor, a door
//! status processor, the car (motor, car controller, car button, car door)
//! and one atomic per floor combining the floor button and floor door.
//!
//! Every step takes one tick, except motor travel between adjacent floors
//! which takes ten. `Motor.pos` is the physical car position; the
//! controllers only hold beliefs about it.

use std::collections::{BTreeMap, BTreeSet};

use super::file::{build_probe, build_safety, bundled_script, driver_message, process_model};
use super::{MessageTypes, Scenario, ScenarioError};
use crate::devs::{AtomicBuilder, ComponentSpec, CoupledSpec, Coupling, Endpoint};
use crate::process::{Connection, Variable};
use crate::time::Span;
use crate::value::{int_range, syms, Value};
use crate::Time;

pub const ELEVATOR_FLOORS: i64 = 5;

const H5: &str = include_str!("../../../../scenarios/h5.fx");

fn tick() -> Span<Time> {
    Span::ticks(1)
}

fn floors() -> Vec<Value> {
    int_range(1, ELEVATOR_FLOORS)
}

fn elevator_ctrl() -> ComponentSpec {
    let ready = "(phase == dispatch or phase == stopped)";
    AtomicBuilder::new("ElevatorCtrl")
        .inputs(&["req", "car"])
        .outputs(&["cmd"])
        .var("phase", syms(&["idle", "dispatch", "movingUP", "movingDOWN", "stopped"]), "idle")
        .var("pos", floors(), 1)
        .var("target", floors(), 1)
        .internal(
            &format!("{ready} and target == pos"),
            tick(),
            &[("cmd", "MsgCar", &[("status", "OPEN"), ("pos", "pos")])],
            &[("phase", "idle")],
        )
        .internal(
            &format!("{ready} and target > pos"),
            tick(),
            &[("cmd", "MsgCar", &[("status", "UP"), ("pos", "pos")])],
            &[("phase", "movingUP")],
        )
        .internal(
            &format!("{ready} and target < pos"),
            tick(),
            &[("cmd", "MsgCar", &[("status", "DOWN"), ("pos", "pos")])],
            &[("phase", "movingDOWN")],
        )
        .external("req", "MsgReq", "phase == idle", &[("target", "msg.floor"), ("phase", "dispatch")])
        .external("req", "MsgBtn", "phase == idle", &[("target", "msg.dest"), ("phase", "dispatch")])
        .external(
            "car",
            "MsgCar",
            "msg.status == REACHED and (phase == movingUP or phase == movingDOWN)",
            &[("pos", "msg.pos"), ("phase", "stopped")],
        )
        .build()
        .map(ComponentSpec::Atomic)
        .expect("ElevatorCtrl")
}

fn car_ctrl() -> ComponentSpec {
    let phases = ["idle", "opening", "closing", "doorwait", "dooropen", "ready", "start", "moving", "reached"];
    AtomicBuilder::new("CarCtrl")
        .inputs(&["ctrl", "motor", "door"])
        .outputs(&["report", "motorCmd", "doorCmd"])
        .var("phase", syms(&phases), "idle")
        .var("pos", floors(), 1)
        .var("door", syms(&["CLOSED", "OPEN"]), "CLOSED")
        .var("motor", syms(&["OFF", "ON"]), "OFF")
        .var("dir", syms(&["UP", "DOWN"]), "UP")
        .internal(
            "phase == opening",
            tick(),
            &[("doorCmd", "MsgDoor", &[("status", "OPEN"), ("floor", "pos")])],
            &[("phase", "doorwait")],
        )
        .internal(
            "phase == closing",
            tick(),
            &[("doorCmd", "MsgDoor", &[("status", "CLOSED"), ("floor", "pos")])],
            &[("phase", "doorwait")],
        )
        .internal(
            "phase == dooropen",
            tick(),
            &[("report", "MsgCar", &[("status", "ARRIVED"), ("pos", "pos")])],
            &[("phase", "idle")],
        )
        .internal(
            "phase == ready",
            tick(),
            &[("report", "MsgCar", &[("status", "READYTOMOVE"), ("pos", "pos")])],
            &[("phase", "start")],
        )
        .internal(
            "phase == start and dir == UP",
            tick(),
            &[("motorCmd", "MsgMotor", &[("cmd", "FORWARD")])],
            &[("phase", "moving"), ("motor", "ON")],
        )
        .internal(
            "phase == start and dir == DOWN",
            tick(),
            &[("motorCmd", "MsgMotor", &[("cmd", "BACKWARD")])],
            &[("phase", "moving"), ("motor", "ON")],
        )
        .internal(
            "phase == reached",
            tick(),
            &[("report", "MsgCar", &[("status", "REACHED"), ("pos", "pos")])],
            &[("phase", "idle")],
        )
        .external("ctrl", "MsgCar", "msg.status == OPEN", &[("phase", "opening")])
        .external(
            "ctrl",
            "MsgCar",
            "msg.status == UP or msg.status == DOWN",
            &[("dir", "msg.status"), ("phase", "closing")],
        )
        .external(
            "door",
            "MsgDoor",
            "msg.status == OPEN and phase == doorwait",
            &[("door", "OPEN"), ("phase", "dooropen")],
        )
        .external(
            "door",
            "MsgDoor",
            "msg.status == CLOSED and phase == doorwait",
            &[("door", "CLOSED"), ("phase", "ready")],
        )
        .external(
            "motor",
            "MsgMotor",
            "msg.cmd == REACHED and phase == moving and dir == UP",
            &[("phase", "reached"), ("motor", "OFF"), ("pos", "pos + 1")],
        )
        .external(
            "motor",
            "MsgMotor",
            "msg.cmd == REACHED and phase == moving and dir == DOWN",
            &[("phase", "reached"), ("motor", "OFF"), ("pos", "pos - 1")],
        )
        .build()
        .map(ComponentSpec::Atomic)
        .expect("CarCtrl")
}

fn motor() -> ComponentSpec {
    AtomicBuilder::new("Motor")
        .inputs(&["cmd"])
        .outputs(&["status"])
        .var("running", syms(&["OFF", "ON"]), "OFF")
        .var("pos", floors(), 1)
        .var("dir", syms(&["UP", "DOWN"]), "UP")
        .internal(
            "running == ON and dir == UP",
            Span::ticks(10),
            &[("status", "MsgMotor", &[("cmd", "REACHED")])],
            &[("pos", "pos + 1"), ("running", "OFF")],
        )
        .internal(
            "running == ON and dir == DOWN",
            Span::ticks(10),
            &[("status", "MsgMotor", &[("cmd", "REACHED")])],
            &[("pos", "pos - 1"), ("running", "OFF")],
        )
        .external("cmd", "MsgMotor", "msg.cmd == FORWARD", &[("running", "ON"), ("dir", "UP")])
        .external("cmd", "MsgMotor", "msg.cmd == BACKWARD", &[("running", "ON"), ("dir", "DOWN")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("Motor")
}

fn car_btn() -> ComponentSpec {
    AtomicBuilder::new("CarBtn")
        .inputs(&["press"])
        .outputs(&["out"])
        .var("pending", vec![false.into(), true.into()], false)
        .var("dest", floors(), 1)
        .internal("pending", tick(), &[("out", "MsgBtn", &[("dest", "dest")])], &[("pending", "false")])
        .external("press", "MsgBtn", "", &[("pending", "true"), ("dest", "msg.dest")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("CarBtn")
}

fn car_door() -> ComponentSpec {
    AtomicBuilder::new("CarDoor")
        .inputs(&["cmd"])
        .outputs(&["status"])
        .var("door", syms(&["CLOSED", "OPEN"]), "CLOSED")
        .var("pending", vec![false.into(), true.into()], false)
        .var("floor", floors(), 1)
        .internal(
            "pending",
            tick(),
            &[("status", "MsgDoor", &[("status", "door"), ("floor", "floor")])],
            &[("pending", "false")],
        )
        .external("cmd", "MsgDoor", "", &[("door", "msg.status"), ("floor", "msg.floor"), ("pending", "true")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("CarDoor")
}

fn door_status_proc() -> ComponentSpec {
    AtomicBuilder::new("DoorStatusProc")
        .inputs(&["carDoor"])
        .outputs(&["floors"])
        .var("pending", vec![false.into(), true.into()], false)
        .var("status", syms(&["CLOSED", "OPEN"]), "CLOSED")
        .var("floor", floors(), 1)
        .internal(
            "pending",
            tick(),
            &[("floors", "MsgDoor", &[("status", "status"), ("floor", "floor")])],
            &[("pending", "false")],
        )
        .external("carDoor", "MsgDoor", "", &[("status", "msg.status"), ("floor", "msg.floor"), ("pending", "true")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("DoorStatusProc")
}

fn request_proc() -> ComponentSpec {
    AtomicBuilder::new("RequestProc")
        .inputs(&["floorReq", "carReq"])
        .outputs(&["out"])
        .var("pending", syms(&["NONE", "REQ", "BTN"]), "NONE")
        .var("val", floors(), 1)
        .internal("pending == REQ", tick(), &[("out", "MsgReq", &[("floor", "val")])], &[("pending", "NONE")])
        .internal("pending == BTN", tick(), &[("out", "MsgBtn", &[("dest", "val")])], &[("pending", "NONE")])
        .external("floorReq", "MsgReq", "", &[("pending", "REQ"), ("val", "msg.floor")])
        .external("carReq", "MsgBtn", "", &[("pending", "BTN"), ("val", "msg.dest")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("RequestProc")
}

fn floor(i: i64) -> ComponentSpec {
    let mine = format!("msg.floor == {i}");
    let me = i.to_string();
    AtomicBuilder::new(&format!("Floor{i}"))
        .inputs(&["hall", "door"])
        .outputs(&["req"])
        .var("requested", vec![false.into(), true.into()], false)
        .var("door", syms(&["CLOSED", "OPEN"]), "CLOSED")
        .internal("requested", tick(), &[("req", "MsgReq", &[("floor", &me)])], &[("requested", "false")])
        .external("hall", "MsgReq", &mine, &[("requested", "true")])
        .external("door", "MsgDoor", &mine, &[("door", "msg.status")])
        .build()
        .map(ComponentSpec::Atomic)
        .expect("Floor")
}

fn c(from: &str, to: &str) -> Coupling {
    Coupling::new(Endpoint::parse(from).expect("endpoint"), Endpoint::parse(to).expect("endpoint"))
}

fn system() -> CoupledSpec {
    let car = CoupledSpec {
        id: "Car".into(),
        inputs: vec!["ctrl".into(), "button".into()],
        outputs: vec!["report".into(), "btn".into(), "door".into()],
        children: vec![motor(), car_ctrl(), car_btn(), car_door()],
        couplings: vec![
            c("Car.ctrl", "CarCtrl.ctrl"),
            c("Car.button", "CarBtn.press"),
            c("CarCtrl.report", "Car.report"),
            c("CarBtn.out", "Car.btn"),
            c("CarDoor.status", "Car.door"),
            c("CarCtrl.motorCmd", "Motor.cmd"),
            c("Motor.status", "CarCtrl.motor"),
            c("CarCtrl.doorCmd", "CarDoor.cmd"),
            c("CarDoor.status", "CarCtrl.door"),
        ],
    };
    let mut children = vec![elevator_ctrl(), request_proc(), door_status_proc(), ComponentSpec::Coupled(car)];
    let mut couplings = vec![
        c("Elevator.carButton", "Car.button"),
        c("ElevatorCtrl.cmd", "Car.ctrl"),
        c("Car.report", "ElevatorCtrl.car"),
        c("Car.btn", "RequestProc.carReq"),
        c("Car.door", "DoorStatusProc.carDoor"),
        c("RequestProc.out", "ElevatorCtrl.req"),
    ];
    for i in 1..=ELEVATOR_FLOORS {
        children.push(floor(i));
        couplings.push(c("Elevator.hall", &format!("Floor{i}.hall")));
        couplings.push(c("DoorStatusProc.floors", &format!("Floor{i}.door")));
        couplings.push(c(&format!("Floor{i}.req"), "RequestProc.floorReq"));
    }
    CoupledSpec {
        id: "Elevator".into(),
        inputs: vec!["hall".into(), "carButton".into()],
        outputs: vec![],
        children,
        couplings,
    }
}

fn message_types() -> MessageTypes {
    let mut m = MessageTypes::new();
    let one = |f: &str, d: Vec<Value>| BTreeMap::from([(f.to_string(), d)]);
    m.insert("MsgReq".into(), one("floor", floors()));
    m.insert("MsgBtn".into(), one("dest", floors()));
    m.insert(
        "MsgCar".into(),
        BTreeMap::from([
            ("status".to_string(), syms(&["OPEN", "UP", "DOWN", "READYTOMOVE", "REACHED", "ARRIVED"])),
            ("pos".to_string(), floors()),
        ]),
    );
    m.insert("MsgMotor".into(), one("cmd", syms(&["FORWARD", "BACKWARD", "REACHED"])));
    m.insert(
        "MsgDoor".into(),
        BTreeMap::from([("status".to_string(), syms(&["OPEN", "CLOSED"])), ("floor".to_string(), floors())]),
    );
    m
}

fn known_vars() -> Vec<Variable> {
    vec![Variable::new("statusCarDoor", syms(&["CLOSED", "OPEN"])), Variable::new("motorRunning", syms(&["ON", "OFF"]))]
}

fn ground_vars() -> Vec<Variable> {
    let mut v = known_vars();
    v.push(Variable::new("inPlace", vec![true.into(), false.into()]));
    v
}

const KNOWN_ROWS: &[&str] = &["CLOSED, * -> RUNNING", "OPEN, OFF -> STOPPED"];
const KNOWN_TS: &[&str] = &["RUNNING -> STOPPED", "STOPPED -> RUNNING"];

/// The car controller's known model and the ground truth that adds the
/// door-open-while-moving state `X`, with `inPlace` as an extra ground
/// variable the observation ignores.
pub fn car_controller_connection() -> Connection {
    let known = process_model(known_vars(), KNOWN_ROWS, KNOWN_TS, Some("RUNNING")).expect("known car model");
    let ground = process_model(
        ground_vars(),
        &["OPEN, ON, * -> X", "CLOSED, *, * -> RUNNING", "OPEN, OFF, * -> STOPPED"],
        &["RUNNING -> STOPPED", "STOPPED -> RUNNING", "STOPPED -> X"],
        Some("RUNNING"),
    )
    .expect("ground car model");
    Connection::new(known, ground, &BTreeMap::from([("inPlace".to_string(), Value::Bool(true))])).expect("connection")
}

/// Bundled elevator: hall call at floor 1 at t=1, car button for floor 3
/// at t=10.
pub fn elevator_baseline() -> Scenario {
    let system = system();
    let message_types = message_types();
    let drivers = vec![
        driver_message(&system, &message_types, Time::from_integer(1), "hall", "MsgReq", &["floor = 1"]),
        driver_message(&system, &message_types, Time::from_integer(10), "carButton", "MsgBtn", &["dest = 3"]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("drivers");

    // Beyond X, the scenario's ground truth also knows the car can be
    // somewhere other than where the controller believes it is.
    let known = process_model(known_vars(), KNOWN_ROWS, KNOWN_TS, Some("RUNNING")).expect("known car model");
    let ground = process_model(
        ground_vars(),
        &["OPEN, ON, * -> X", "*, *, false -> DISPLACED", "CLOSED, *, true -> RUNNING", "OPEN, OFF, true -> STOPPED"],
        &[
            "RUNNING -> STOPPED",
            "STOPPED -> RUNNING",
            "STOPPED -> X",
            "RUNNING -> DISPLACED",
            "STOPPED -> DISPLACED",
            "DISPLACED -> RUNNING",
            "DISPLACED -> STOPPED",
        ],
        Some("RUNNING"),
    )
    .expect("ground car model");
    let probe = build_probe(
        &system,
        known.clone(),
        ground.clone(),
        &["inPlace = true"],
        &["statusCarDoor = CarCtrl.door", "motorRunning = CarCtrl.motor", "inPlace = CarCtrl.pos == Motor.pos"],
    )
    .expect("probe");
    let safety = build_safety(
        &probe,
        "CarCtrl",
        "car does not move with the door open",
        "not (statusCarDoor == OPEN and motorRunning == ON)",
    )
    .expect("safety");

    let mut s = Scenario {
        system,
        message_types,
        drivers,
        known_models: BTreeMap::from([("CarCtrl".to_string(), known)]),
        ground_models: BTreeMap::from([("CarCtrl".to_string(), ground)]),
        connections: BTreeMap::from([("CarCtrl".to_string(), probe)]),
        safety: vec![safety],
        scripts: BTreeMap::from([("h5".to_string(), bundled_script(H5))]),
        targets: ["Motor", "CarCtrl", "ElevatorCtrl", "RequestProc"]
            .iter()
            .map(|t| t.to_string())
            .collect::<BTreeSet<_>>(),
    };
    s.normalize();
    s
}

/// The baseline with the car starting at `start` and the passenger asking
/// for `dest`: hall call at `start` at t=1, car button at t=10.
pub fn elevator_case(start: i64, dest: i64) -> Result<Scenario, ScenarioError> {
    let mut s = elevator_baseline();
    for comp in ["ElevatorCtrl", "CarCtrl", "Motor"] {
        s.set_initial(comp, "pos", Value::Int(start))?;
    }
    let hall = format!("floor = {start}");
    let button = format!("dest = {dest}");
    s.drivers = vec![
        driver_message(&s.system, &s.message_types, Time::from_integer(1), "hall", "MsgReq", &[hall])
            .map_err(|e| ScenarioError::at("drivers[0]", e))?,
        driver_message(&s.system, &s.message_types, Time::from_integer(10), "carButton", "MsgBtn", &[button])
            .map_err(|e| ScenarioError::at("drivers[1]", e))?,
    ];
    Ok(s)
}
