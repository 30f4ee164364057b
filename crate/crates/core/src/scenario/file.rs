use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use super::{MessageTypes, Probe, Scenario, ScenarioError, ScenarioSafety};
use crate::devs::{AtomicBuilder, ComponentSpec, CoupledSpec, Coupling, EmitSrc as Emit, Endpoint, Fields, Message};
use crate::effects::{parse_script, validate, EffectProgram};
use crate::expr::{EmptyEnv, Expr};
use crate::process::{
    check_ground_truth, Connection, ProcessModel, Row, SafetyProperty, StateModel, Variable, VariableSpace,
};
use crate::time::Span;
use crate::value::{int_range, Value};
use crate::Time;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSrc {
    system: SystemSrc,
    #[serde(default)]
    messages: BTreeMap<String, BTreeMap<String, DomainSrc>>,
    #[serde(default)]
    drivers: Vec<DriverSrc>,
    #[serde(default)]
    process_models: BTreeMap<String, PmPairSrc>,
    #[serde(default)]
    connections: BTreeMap<String, ConnSrc>,
    #[serde(default)]
    safety: Vec<SafetySrc>,
    #[serde(default)]
    scripts: BTreeMap<String, String>,
    #[serde(default)]
    attack: AttackSrc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSrc {
    id: String,
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    couplings: Vec<String>,
    #[serde(default)]
    coupled: Vec<CoupledSrc>,
    #[serde(default)]
    atomic: Vec<AtomicSrc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoupledSrc {
    id: String,
    parent: Option<String>,
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    couplings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomicSrc {
    id: String,
    parent: Option<String>,
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    vars: Vec<VarSrc>,
    #[serde(default)]
    internal: Vec<InternalSrc>,
    #[serde(default)]
    external: Vec<ExternalSrc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DomainSrc {
    List(Vec<toml::Value>),
    Range(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VarSrc {
    name: String,
    domain: DomainSrc,
    init: Option<toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InternalSrc {
    #[serde(default)]
    when: String,
    after: toml::Value,
    #[serde(default)]
    emit: Vec<EmitSrc>,
    #[serde(default)]
    set: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmitSrc {
    port: String,
    #[serde(rename = "type")]
    msg_type: String,
    #[serde(default)]
    fields: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalSrc {
    port: String,
    #[serde(rename = "type", default)]
    msg_type: String,
    #[serde(default)]
    when: String,
    #[serde(default)]
    set: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DriverSrc {
    at: toml::Value,
    port: String,
    #[serde(rename = "type")]
    msg_type: String,
    #[serde(default)]
    fields: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PmPairSrc {
    known: PmSrc,
    ground: PmSrc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PmSrc {
    vars: Vec<PmVarSrc>,
    rows: Vec<String>,
    #[serde(default)]
    transitions: Vec<String>,
    initial: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PmVarSrc {
    name: String,
    domain: DomainSrc,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnSrc {
    #[serde(default)]
    defaults: Vec<String>,
    bind: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SafetySrc {
    component: String,
    name: String,
    expr: String,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AttackSrc {
    #[serde(default)]
    targets: Vec<String>,
}

/// Reads and validates a scenario file. Script paths are relative to the
/// file's directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_scenario_str(&text, |name| {
        let p = base.join(name);
        std::fs::read_to_string(&p).map_err(|source| ScenarioError::Io { path: p.display().to_string(), source })
    })
}

/// Parses scenario text; `read_script` resolves the paths in `[scripts]`.
pub fn load_scenario_str(
    text: &str,
    read_script: impl Fn(&str) -> Result<String, ScenarioError>,
) -> Result<Scenario, ScenarioError> {
    let src: FileSrc = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string().trim_end().to_string()))?;
    let system = build_system(&src.system)?;
    let message_types = build_messages(&src.messages)?;

    let mut drivers = Vec::new();
    for (i, d) in src.drivers.iter().enumerate() {
        drivers
            .push(build_driver(&system, &message_types, d).map_err(|e| ScenarioError::at(format!("drivers[{i}]"), e))?);
    }

    let mut known_models = BTreeMap::new();
    let mut ground_models = BTreeMap::new();
    for (comp, pair) in &src.process_models {
        let loc = format!("process_models.{comp}");
        if system.find(comp).is_none() {
            return Err(ScenarioError::at(&loc, "no such component"));
        }
        let known = build_pm(&pair.known).map_err(|e| ScenarioError::at(format!("{loc}.known"), e))?;
        let ground = build_pm(&pair.ground).map_err(|e| ScenarioError::at(format!("{loc}.ground"), e))?;
        check_ground_truth(&ground).map_err(|e| ScenarioError::at(format!("{loc}.ground"), e))?;
        known_models.insert(comp.clone(), known);
        ground_models.insert(comp.clone(), ground);
    }

    let mut connections = BTreeMap::new();
    for (comp, c) in &src.connections {
        let loc = format!("connections.{comp}");
        let (Some(known), Some(ground)) = (known_models.get(comp), ground_models.get(comp)) else {
            return Err(ScenarioError::at(&loc, "no process models declared for this component"));
        };
        let probe = build_probe(&system, known.clone(), ground.clone(), &c.defaults, &c.bind)
            .map_err(|e| ScenarioError::at(&loc, e))?;
        connections.insert(comp.clone(), probe);
    }

    let mut safety = Vec::new();
    for (i, s) in src.safety.iter().enumerate() {
        let loc = format!("safety[{i}]");
        let probe = connections
            .get(&s.component)
            .ok_or_else(|| ScenarioError::at(&loc, format!("no connection for `{}`", s.component)))?;
        safety.push(build_safety(probe, &s.component, &s.name, &s.expr).map_err(|e| ScenarioError::at(&loc, e))?);
    }

    let mut scenario = Scenario {
        system,
        message_types,
        drivers,
        known_models,
        ground_models,
        connections,
        safety,
        scripts: BTreeMap::new(),
        targets: BTreeSet::new(),
    };
    for t in &src.attack.targets {
        if scenario.system.find(t).is_none() {
            return Err(ScenarioError::at("attack.targets", format!("no such component `{t}`")));
        }
        scenario.targets.insert(t.clone());
    }
    let catalog = scenario.catalog();
    for (name, file) in &src.scripts {
        let loc = format!("scripts.{name}");
        let prog = parse_script(&read_script(file)?).map_err(|e| ScenarioError::at(&loc, e))?;
        if let Some(d) = validate(&prog, &catalog).first() {
            return Err(ScenarioError::at(&loc, d));
        }
        scenario.scripts.insert(name.clone(), prog);
    }
    scenario.normalize();
    Ok(scenario)
}

// ---- text forms shared with the code-built scenarios ----

pub(crate) fn toml_value(v: &toml::Value) -> Result<Value, String> {
    match v {
        toml::Value::Integer(i) => Ok(Value::Int(*i)),
        toml::Value::Boolean(b) => Ok(Value::Bool(*b)),
        toml::Value::String(s) if crate::expr::is_plain_ident(s) => Ok(Value::sym(s.as_str())),
        other => Err(format!("`{other}` is not an integer, boolean or symbol")),
    }
}

/// A domain given as a list of values or as an inclusive range `lo..hi`.
fn domain(d: &DomainSrc) -> Result<Vec<Value>, String> {
    match d {
        DomainSrc::List(vs) => vs.iter().map(toml_value).collect(),
        DomainSrc::Range(s) => {
            let (lo, hi) = s.split_once("..").ok_or_else(|| format!("`{s}` is not a range `lo..hi`"))?;
            let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
            let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
            if lo > hi {
                return Err(format!("empty range `{s}`"));
            }
            Ok(int_range(lo, hi))
        }
    }
}

/// Parses a time: an integer, a `num/den` string, or `inf` where allowed.
pub(crate) fn parse_time(v: &toml::Value, allow_inf: bool) -> Result<Span<Time>, String> {
    let t = match v {
        toml::Value::Integer(i) => Time::from_integer(*i),
        toml::Value::String(s) if allow_inf && s == "inf" => return Ok(Span::Infinite),
        toml::Value::String(s) => {
            let (n, d) = s.split_once('/').ok_or_else(|| format!("bad time `{s}`"))?;
            let n: i64 = n.trim().parse().map_err(|_| format!("bad time `{s}`"))?;
            let d: i64 = d.trim().parse().map_err(|_| format!("bad time `{s}`"))?;
            if d <= 0 {
                return Err(format!("bad time `{s}`"));
            }
            Time::new(n, d)
        }
        other => return Err(format!("bad time `{other}`")),
    };
    if t < Time::from_integer(0) {
        return Err(format!("negative time {t}"));
    }
    Ok(Span::Finite(t))
}

/// Splits `name = expression`.
pub(crate) fn split_assign(s: &str) -> Result<(&str, &str), String> {
    let (name, rhs) = s.split_once('=').ok_or_else(|| format!("expected `name = value` in `{s}`"))?;
    let name = name.trim();
    if !crate::expr::is_plain_ident(name) || rhs.starts_with('=') {
        return Err(format!("expected `name = value` in `{s}`"));
    }
    Ok((name, rhs.trim()))
}

/// A constant assignment such as `floor = 1`.
pub(crate) fn literal_assign(s: &str) -> Result<(String, Value), String> {
    let (name, rhs) = split_assign(s)?;
    let v =
        Expr::parse(rhs).map_err(|e| format!("`{rhs}`: {e}"))?.eval(&EmptyEnv).map_err(|e| format!("`{rhs}`: {e}"))?;
    Ok((name.to_string(), v))
}

fn token_value(tok: &str) -> Result<Option<Value>, String> {
    match tok {
        "*" => Ok(None),
        "true" => Ok(Some(Value::Bool(true))),
        "false" => Ok(Some(Value::Bool(false))),
        t => match t.parse::<i64>() {
            Ok(i) => Ok(Some(Value::Int(i))),
            Err(_) if crate::expr::is_plain_ident(t) => Ok(Some(Value::sym(t))),
            Err(_) => Err(format!("bad pattern value `{t}`")),
        },
    }
}

/// An observation-table row: `CLOSED, * -> RUNNING`.
pub(crate) fn parse_row(s: &str) -> Result<Row, String> {
    let (pat, state) = s.rsplit_once("->").ok_or_else(|| format!("expected `values -> state` in `{s}`"))?;
    let pattern = pat.split(',').map(|t| token_value(t.trim())).collect::<Result<Vec<_>, _>>()?;
    let state = state.trim();
    if state.is_empty() {
        return Err(format!("missing state in `{s}`"));
    }
    Ok(Row::new(pattern, state))
}

/// `A -> B`
pub(crate) fn parse_transition(s: &str) -> Result<(String, String), String> {
    let (a, b) = s.split_once("->").ok_or_else(|| format!("expected `from -> to` in `{s}`"))?;
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(format!("expected `from -> to` in `{s}`"));
    }
    Ok((a.to_string(), b.to_string()))
}

pub(crate) fn process_model(
    vars: Vec<Variable>,
    rows: &[&str],
    transitions: &[&str],
    initial: Option<&str>,
) -> Result<ProcessModel, String> {
    let space = VariableSpace::new(vars).map_err(|e| e.to_string())?;
    let rows = rows.iter().map(|r| parse_row(r)).collect::<Result<Vec<_>, _>>()?;
    let sm = StateModel::from_rows(space, None, &rows).map_err(|e| e.to_string())?;
    let ts = transitions.iter().map(|t| parse_transition(t)).collect::<Result<BTreeSet<_>, _>>()?;
    ProcessModel::new(sm, ts, initial.map(str::to_string)).map_err(|e| e.to_string())
}

/// Connects the models and orders the bindings like the ground variables.
pub(crate) fn build_probe(
    system: &CoupledSpec,
    known: ProcessModel,
    ground: ProcessModel,
    defaults: &[impl AsRef<str>],
    bind: &[impl AsRef<str>],
) -> Result<Probe, String> {
    let defaults = defaults.iter().map(|d| literal_assign(d.as_ref())).collect::<Result<BTreeMap<_, _>, _>>()?;
    let connection = Connection::new(known, ground, &defaults).map_err(|e| e.to_string())?;
    let mut given = BTreeMap::new();
    for b in bind {
        let (name, rhs) = split_assign(b.as_ref())?;
        let e = Expr::parse(rhs).map_err(|e| format!("binding `{name}`: {e}"))?;
        for (path, _) in e.names() {
            check_state_ref(system, path).map_err(|m| format!("binding `{name}`: {m}"))?;
        }
        if given.insert(name.to_string(), e).is_some() {
            return Err(format!("ground variable `{name}` bound twice"));
        }
    }
    let mut bindings = Vec::new();
    for v in connection.ground().space().names() {
        let e = given.remove(v).ok_or_else(|| format!("ground variable `{v}` has no binding"))?;
        bindings.push((v.to_string(), e));
    }
    if let Some(extra) = given.keys().next() {
        return Err(format!("`{extra}` is not a ground variable"));
    }
    Ok(Probe { connection, bindings })
}

/// Binding names must be `Component.variable` of an atomic leaf, or bare
/// symbols.
fn check_state_ref(system: &CoupledSpec, path: &[String]) -> Result<(), String> {
    match path {
        [_] => Ok(()),
        [c, v] => match system.find(c) {
            Some(ComponentSpec::Atomic(a)) if a.space.index_of(v).is_some() => Ok(()),
            Some(ComponentSpec::Atomic(_)) => Err(format!("`{c}` has no variable `{v}`")),
            _ => Err(format!("no atomic component `{c}`")),
        },
        _ => Err(format!("bad name `{}`", path.join("."))),
    }
}

pub(crate) fn build_safety(probe: &Probe, component: &str, name: &str, expr: &str) -> Result<ScenarioSafety, String> {
    let e = Expr::parse(expr).map_err(|e| e.to_string())?;
    let property = SafetyProperty::new(name, e, probe.connection.ground().state_model()).map_err(|e| e.to_string())?;
    Ok(ScenarioSafety { component: component.to_string(), property })
}

// ---- sections ----

fn coupling(s: &str) -> Result<Coupling, String> {
    let (a, b) = s.split_once("->").ok_or_else(|| format!("expected `A.p -> B.q` in `{s}`"))?;
    let from = Endpoint::parse(a.trim()).ok_or_else(|| format!("bad endpoint `{}`", a.trim()))?;
    let to = Endpoint::parse(b.trim()).ok_or_else(|| format!("bad endpoint `{}`", b.trim()))?;
    Ok(Coupling::new(from, to))
}

fn couplings(list: &[String], loc: &str) -> Result<Vec<Coupling>, ScenarioError> {
    list.iter().map(|c| coupling(c)).collect::<Result<_, _>>().map_err(|e| ScenarioError::at(loc, e))
}

fn split_all(set: &[String]) -> Result<Vec<(&str, &str)>, String> {
    set.iter().map(|s| split_assign(s)).collect()
}

fn build_atomic(a: &AtomicSrc) -> Result<ComponentSpec, String> {
    let ins: Vec<&str> = a.inputs.iter().map(String::as_str).collect();
    let outs: Vec<&str> = a.outputs.iter().map(String::as_str).collect();
    let mut b = AtomicBuilder::<Time>::new(&a.id).inputs(&ins).outputs(&outs);
    for v in &a.vars {
        let dom = domain(&v.domain).map_err(|e| format!("variable `{}`: {e}", v.name))?;
        let init = match &v.init {
            Some(x) => toml_value(x).map_err(|e| format!("variable `{}`: {e}", v.name))?,
            None => dom[0].clone(),
        };
        b = b.var(&v.name, dom, init);
    }
    for (i, r) in a.internal.iter().enumerate() {
        let after = parse_time(&r.after, true).map_err(|e| format!("internal[{i}]: {e}"))?;
        let set = split_all(&r.set).map_err(|e| format!("internal[{i}]: {e}"))?;
        let fields: Vec<Vec<(&str, &str)>> = r
            .emit
            .iter()
            .map(|e| split_all(&e.fields))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("internal[{i}]: {e}"))?;
        let emits: Vec<Emit> =
            r.emit.iter().zip(&fields).map(|(e, fs)| (e.port.as_str(), e.msg_type.as_str(), fs.as_slice())).collect();
        b = b.internal(&r.when, after, &emits, &set);
    }
    for (i, r) in a.external.iter().enumerate() {
        let set = split_all(&r.set).map_err(|e| format!("external[{i}]: {e}"))?;
        b = b.external(&r.port, &r.msg_type, &r.when, &set);
    }
    b.build().map(ComponentSpec::Atomic)
}

fn build_system(src: &SystemSrc) -> Result<CoupledSpec, ScenarioError> {
    let mut coupled: BTreeMap<String, (Option<String>, CoupledSpec)> = BTreeMap::new();
    coupled.insert(
        src.id.clone(),
        (
            None,
            CoupledSpec {
                id: src.id.clone(),
                inputs: src.inputs.clone(),
                outputs: src.outputs.clone(),
                children: vec![],
                couplings: couplings(&src.couplings, "system.couplings")?,
            },
        ),
    );
    for c in &src.coupled {
        let loc = format!("system.coupled[{}]", c.id);
        let spec = CoupledSpec {
            id: c.id.clone(),
            inputs: c.inputs.clone(),
            outputs: c.outputs.clone(),
            children: vec![],
            couplings: couplings(&c.couplings, &loc)?,
        };
        let parent = c.parent.clone().unwrap_or_else(|| src.id.clone());
        if coupled.insert(c.id.clone(), (Some(parent), spec)).is_some() {
            return Err(ScenarioError::at(loc, "duplicate component id"));
        }
    }
    let mut leaves: Vec<(String, ComponentSpec)> = Vec::new();
    for a in &src.atomic {
        let loc = format!("system.atomic[{}]", a.id);
        let spec = build_atomic(a).map_err(|e| ScenarioError::at(&loc, e))?;
        leaves.push((a.parent.clone().unwrap_or_else(|| src.id.clone()), spec));
    }
    for (parent, leaf) in leaves {
        let loc = format!("system.atomic[{}]", leaf.id());
        let (_, p) =
            coupled.get_mut(&parent).ok_or_else(|| ScenarioError::at(loc, format!("unknown parent `{parent}`")))?;
        p.children.push(leaf);
    }
    // attach coupled models bottom-up; a parent chain that never reaches the
    // root is a cycle
    loop {
        let referenced: BTreeSet<String> = coupled.values().filter_map(|(p, _)| p.clone()).collect();
        let Some(id) =
            coupled.iter().find(|(id, (p, _))| p.is_some() && !referenced.contains(*id)).map(|(id, _)| id.clone())
        else {
            break;
        };
        let (parent, spec) = coupled.remove(&id).expect("present");
        let parent = parent.expect("non-root");
        let loc = format!("system.coupled[{id}]");
        let (_, p) =
            coupled.get_mut(&parent).ok_or_else(|| ScenarioError::at(loc, format!("unknown parent `{parent}`")))?;
        p.children.push(ComponentSpec::Coupled(spec));
    }
    if coupled.len() != 1 {
        let stuck: Vec<&String> = coupled.keys().filter(|k| **k != src.id).collect();
        return Err(ScenarioError::at("system.coupled", format!("parent cycle through {stuck:?}")));
    }
    let (_, root) = coupled.remove(&src.id).expect("root stays");
    root.validate().map_err(|e| ScenarioError::at("system", e))?;
    check_emits(&root)?;
    Ok(root)
}

fn check_emits(spec: &CoupledSpec) -> Result<(), ScenarioError> {
    for leaf in spec.leaves() {
        if let ComponentSpec::Atomic(a) = leaf {
            for (i, r) in a.internal.iter().enumerate() {
                for e in &r.emit {
                    if !a.outputs.contains(&e.port) {
                        return Err(ScenarioError::at(
                            format!("system.atomic[{}].internal[{i}]", a.id),
                            format!("emits on unknown output `{}`", e.port),
                        ));
                    }
                }
            }
            for (i, r) in a.external.iter().enumerate() {
                if !a.inputs.contains(&r.port) {
                    return Err(ScenarioError::at(
                        format!("system.atomic[{}].external[{i}]", a.id),
                        format!("reacts on unknown input `{}`", r.port),
                    ));
                }
            }
        }
    }
    Ok(())
}

fn build_messages(src: &BTreeMap<String, BTreeMap<String, DomainSrc>>) -> Result<MessageTypes, ScenarioError> {
    let mut out = MessageTypes::new();
    for (ty, fields) in src {
        let mut fs = BTreeMap::new();
        for (f, d) in fields {
            fs.insert(f.clone(), domain(d).map_err(|e| ScenarioError::at(format!("messages.{ty}.{f}"), e))?);
        }
        out.insert(ty.clone(), fs);
    }
    Ok(out)
}

pub(crate) fn driver_message(
    system: &CoupledSpec,
    types: &MessageTypes,
    at: Time,
    port: &str,
    msg_type: &str,
    fields: &[impl AsRef<str>],
) -> Result<Message, String> {
    if !system.inputs.iter().any(|p| p == port) {
        return Err(format!("`{port}` is not an input of `{}`", system.id));
    }
    let decl = types.get(msg_type).ok_or_else(|| format!("undeclared message type `{msg_type}`"))?;
    let mut fs = Fields::new();
    for f in fields {
        let (name, v) = literal_assign(f.as_ref())?;
        let dom = decl.get(&name).ok_or_else(|| format!("`{msg_type}` has no field `{name}`"))?;
        if !dom.is_empty() && !dom.contains(&v) {
            return Err(format!("{v} is outside the domain of `{msg_type}.{name}`"));
        }
        fs.insert(name, v);
    }
    Ok(Message::new(msg_type, Endpoint::new("env", "driver"), Endpoint::new(system.id.clone(), port), fs, at))
}

fn build_driver(system: &CoupledSpec, types: &MessageTypes, d: &DriverSrc) -> Result<Message, String> {
    let Span::Finite(at) = parse_time(&d.at, false)? else { unreachable!("inf rejected") };
    driver_message(system, types, at, &d.port, &d.msg_type, &d.fields)
}

fn build_pm(src: &PmSrc) -> Result<ProcessModel, String> {
    let vars = src
        .vars
        .iter()
        .map(|v| {
            domain(&v.domain).map(|d| Variable::new(&v.name, d)).map_err(|e| format!("variable `{}`: {e}", v.name))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<&str> = src.rows.iter().map(String::as_str).collect();
    let ts: Vec<&str> = src.transitions.iter().map(String::as_str).collect();
    process_model(vars, &rows, &ts, src.initial.as_deref())
}

/// Reads a script bundled next to the scenarios.
pub(crate) fn bundled_script(text: &str) -> EffectProgram {
    parse_script(text).expect("bundled scripts parse")
}
