use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpsfx"))
}

fn bundled(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).display().to_string()
}

fn cpsfx(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn h5_run_reports_pmi() {
    let o = cpsfx(&["run", &bundled("elevator.scn"), "--script", &bundled("h5.fx"), "--until", "200"]);
    assert_eq!(code(&o), 3);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["H5", "2"]), "{out}");
    assert!(out.lines().any(|l| l.trim_start().starts_with("Motor") && l.contains("pos=1")), "{out}");
}

#[test]
fn baseline_run_is_clean() {
    let o = cpsfx(&["run", &bundled("elevator.scn"), "--until", "200"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.trim_start().starts_with("Motor") && l.contains("pos=3")), "{out}");
}

#[test]
fn trapcash_run_has_one_incorrect_observation() {
    let o = cpsfx(&[
        "run",
        &bundled("atm.scn"),
        "--script",
        &bundled("trapcash.fx"),
        "--until",
        "100",
        "--format",
        "jsonl",
    ]);
    assert_eq!(code(&o), 3);
    let findings: Vec<serde_like::Line> = stdout(&o).lines().filter_map(serde_like::parse).collect();
    let pmi: Vec<_> = findings.iter().filter(|l| l.kind == "pmi_finding").collect();
    assert_eq!(pmi.len(), 1);
    assert!(pmi[0].raw.contains("IncorrectlyObserved"));
}

/// Just enough JSON picking to avoid a serde dependency in this crate.
mod serde_like {
    pub struct Line {
        pub kind: String,
        pub raw: String,
    }

    pub fn parse(raw: &str) -> Option<Line> {
        let rest = raw.split_once("\"kind\":\"")?.1;
        let kind = rest.split_once('"')?.0.to_string();
        Some(Line { kind, raw: raw.to_string() })
    }
}

#[test]
fn safety_violation_takes_precedence() {
    // Opening the door while the motor runs: the car controller is told to
    // open right after it has started the motor.
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("open.fx");
    std::fs::write(
        &script,
        "effect Open on msg MsgMotor from CarCtrl to Motor where cmd == FORWARD\n\
           generate msg MsgDoor from CarDoor to CarCtrl with status = OPEN, floor = 1;\n\
         activate Open on msg MsgMotor from CarCtrl to Motor;\n",
    )
    .unwrap();
    let scn = std::fs::read_to_string(bundled("elevator.scn"))
        .unwrap()
        .replace("h5 = \"h5.fx\"", &format!("h5 = {:?}", bundled("h5.fx")))
        .replace(
            "targets = [\"Motor\", \"CarCtrl\", \"ElevatorCtrl\", \"RequestProc\"]",
            "targets = [\"Motor\", \"CarCtrl\", \"CarDoor\"]",
        )
        .replace(
            "when = \"msg.status == OPEN and phase == doorwait\"",
            "when = \"msg.status == OPEN and (phase == doorwait or phase == moving)\"",
        );
    let path = dir.path().join("elevator.scn");
    std::fs::write(&path, scn).unwrap();
    let o = cpsfx(&["run", path.to_str().unwrap(), "--script", script.to_str().unwrap(), "--until", "200"]);
    let out = stdout(&o);
    assert_eq!(code(&o), 2, "{out}");
    assert!(out.contains("car does not move with the door open"), "{out}");
}

#[test]
fn trace_and_report_files_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let report = dir.path().join("r.txt");
    let args = |t: &PathBuf, r: &PathBuf| {
        vec![
            "run".to_string(),
            bundled("elevator.scn"),
            "--script".into(),
            bundled("h5.fx"),
            "--until".into(),
            "200".into(),
            "--trace".into(),
            t.display().to_string(),
            "--report".into(),
            r.display().to_string(),
        ]
    };
    let o = bin().args(args(&trace, &report)).output().unwrap();
    assert_eq!(code(&o), 3);
    let first_trace = std::fs::read(&trace).unwrap();
    let first_report = std::fs::read_to_string(&report).unwrap();
    assert!(first_report.contains(&trace.display().to_string()));
    assert!(stdout(&o).is_empty());

    let o = bin().args(args(&trace, &report)).output().unwrap();
    assert_eq!(code(&o), 3);
    assert_eq!(std::fs::read(&trace).unwrap(), first_trace);
    assert_eq!(std::fs::read_to_string(&report).unwrap(), first_report);

    // regenerated from the saved trace
    let o = cpsfx(&["report", &bundled("elevator.scn"), trace.to_str().unwrap(), "--script", &bundled("h5.fx")]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o), first_report);
}

#[test]
fn validate_reports_diagnostics() {
    let o = cpsfx(&["validate", &bundled("elevator.scn"), &bundled("h5.fx")]);
    assert_eq!(code(&o), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fx");
    std::fs::write(&bad, "effect E on msg MsgMotor from Nobody to Motor drop;\n").unwrap();
    let o = cpsfx(&["validate", &bundled("elevator.scn"), bad.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Nobody"));

    std::fs::write(&bad, "effect E on").unwrap();
    assert_eq!(code(&cpsfx(&["validate", &bundled("elevator.scn"), bad.to_str().unwrap()])), 65);
}

#[test]
fn pmi_reports() {
    let o = cpsfx(&["pmi", &bundled("elevator.scn"), "--component", "CarCtrl"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("X: (STOPPED, X)"), "{out}");
    assert!(out.contains("theorem 1: PmiInstance"), "{out}");

    let o = cpsfx(&["pmi", &bundled("atm.scn"), "--component", "ATM"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("forced states:         {Activate Malware, Trap Card, Trap Cash}"), "{out}");

    assert_eq!(code(&cpsfx(&["pmi", &bundled("atm.scn"), "--component", "Customer"])), 65);
}

#[test]
fn pmi_on_a_complete_model_notes_it() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(bundled("atm.scn")).unwrap();
    // ground truth with the same states and transitions as the known model
    let (head, ground) = text.split_once("[process_models.ATM.ground]").unwrap();
    let forced = [
        "\"ActivateMalware, *, * -> Activate Malware\",",
        "\"AnotherTransaction, true, * -> Trap Cash\",",
        "\"EjectCard, *, true -> Trap Card\",",
        "\"Dispense Cash -> Trap Cash\",",
        "\"Trap Cash -> Process Transaction\",",
        "\"Trap Cash -> Print Receipt\",",
        "\"Print Receipt -> Trap Card\",",
        "\"Trap Card -> Insert Readable Card\",",
        "\"Insert Readable Card -> Activate Malware\",",
        "\"Activate Malware -> Dispense Cash\",",
    ];
    let mut ground = ground.to_string();
    for f in forced {
        assert!(ground.contains(f), "{f}");
        ground = ground.replacen(f, "", 1);
    }
    let scn = format!("{head}[process_models.ATM.ground]{ground}")
        .replace("[scripts]\njackpot = \"jackpot.fx\"\ntrapcard = \"trapcard.fx\"\ntrapcash = \"trapcash.fx\"\n", "");
    let path = dir.path().join("atm.scn");
    std::fs::write(&path, scn).unwrap();
    let o = cpsfx(&["pmi", path.to_str().unwrap(), "--component", "ATM"]);
    let out = stdout(&o);
    assert_eq!(code(&o), 0, "{out}{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.contains("forced states:         {}"), "{out}");
    assert!(out.contains("forced transitions:    {}"), "{out}");
    assert!(out.contains("NotIncomplete"), "{out}");
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(code(&cpsfx(&[])), 64);
    assert_eq!(code(&cpsfx(&["frobnicate"])), 64);
    assert_eq!(code(&cpsfx(&["run", &bundled("elevator.scn"), "--until", "soon"])), 64);
    assert_eq!(code(&cpsfx(&["run", &bundled("elevator.scn"), "--format", "xml"])), 64);
    assert_eq!(code(&cpsfx(&["--help"])), 0);
    assert_eq!(code(&cpsfx(&["run", "/nonexistent.scn"])), 65);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "[system]\nid = \"Top\"\ncouplings = [\"Top.go -> Ghost.in\"]\n").unwrap();
    let o = cpsfx(&["run", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).contains("system"));
}
