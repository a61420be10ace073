//! JSON scenarios: a measure space, a bundle, named sections and a command list.
//!
//! ```json
//! {
//!   "space": [{"atom_id": "w1", "weight": 0.5}, {"atom_id": "w2", "weight": 0.5}],
//!   "bundle": {"w1": "scalar", "w2": {"kind": "matrix", "n": 2}},
//!   "sections": [
//!     {"name": "x", "values": {"w1": [0.5, 0], "w2": [[1, 0], [0, 0], [0, 0], [2, 0]]}}
//!   ],
//!   "defaults": {"tolerance": 1e-8, "samples": 500, "seed": 0, "cap": 4096},
//!   "commands": ["norms", {"command": "invert", "section": "x"}, "verify"]
//! }
//! ```
//!
//! Matrix literals are row-major lists of `[re, im]` pairs. Commands take an
//! optional `tolerance`, `samples`, `seed` and `cap` of their own.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bundle::{Bundle, BundleRef, Section};
use crate::error::{Error, Result};
use crate::fiber::FiberKind;
use crate::measure::{AtomicMeasureSpace, SpaceRef};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_CAP: usize = 4096;

/// Optional run parameters; unset fields fall through to the next layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

impl Params {
    /// `self` with unset fields taken from `below`.
    pub fn over(self, below: Params) -> Params {
        Params {
            tolerance: self.tolerance.or(below.tolerance),
            samples: self.samples.or(below.samples),
            seed: self.seed.or(below.seed),
            cap: self.cap.or(below.cap),
        }
    }

    pub fn resolve(self) -> Settings {
        Settings {
            tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            cap: self.cap.unwrap_or(DEFAULT_CAP),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Norms,
    Invert { section: String },
    Perturb { x: String, h: String },
    Spectrum { section: String },
    Reconstruct,
    GelfandMazur,
    ReverseBound,
    Verify,
}

impl Command {
    pub const NAMES: [&'static str; 8] = [
        "norms",
        "invert",
        "perturb",
        "spectrum",
        "reconstruct",
        "gelfand-mazur",
        "reverse-bound",
        "verify",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Norms => "norms",
            Command::Invert { .. } => "invert",
            Command::Perturb { .. } => "perturb",
            Command::Spectrum { .. } => "spectrum",
            Command::Reconstruct => "reconstruct",
            Command::GelfandMazur => "gelfand-mazur",
            Command::ReverseBound => "reverse-bound",
            Command::Verify => "verify",
        }
    }

    /// Section names the command refers to, keyed by argument.
    pub fn references(&self) -> Vec<(&'static str, &str)> {
        match self {
            Command::Invert { section } | Command::Spectrum { section } => {
                vec![("section", section)]
            }
            Command::Perturb { x, h } => vec![("x", x), ("h", h)],
            _ => Vec::new(),
        }
    }

    pub fn args_json(&self) -> Value {
        Value::Object(
            self.references()
                .into_iter()
                .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
                .collect(),
        )
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        for (_, name) in self.references() {
            write!(f, " {name}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub command: Command,
    pub params: Params,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: SpaceRef,
    pub bundle: BundleRef,
    /// Named sections in file order.
    pub sections: Vec<(String, Section)>,
    pub defaults: Params,
    pub steps: Vec<Step>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    atom_id: String,
    weight: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    name: String,
    values: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    space: Vec<RawAtom>,
    bundle: Map<String, Value>,
    #[serde(default)]
    sections: Vec<RawSection>,
    #[serde(default)]
    defaults: Params,
    #[serde(default)]
    commands: Vec<Value>,
}

fn at(path: impl Into<String>, message: impl fmt::Display) -> Error {
    Error::Scenario {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Accepts `"matrix(2)"` or `{"kind": "matrix", "n": 2}`.
pub fn parse_descriptor(value: &Value) -> Result<FiberKind> {
    match value {
        Value::String(s) => s.parse(),
        other => serde_json::from_value::<FiberKind>(other.clone())
            .map_err(|e| Error::InvalidDescriptor(format!("{other}: {e}")))?
            .validate(),
    }
}

fn parse_step(index: usize, value: &Value, sections: &[(String, Section)]) -> Result<Step> {
    let path = format!("commands[{index}]");
    let (name, obj) = match value {
        Value::String(s) => (s.as_str(), Map::new()),
        Value::Object(m) => {
            let name = m
                .get("command")
                .and_then(Value::as_str)
                .ok_or_else(|| at(&path, "missing string field `command`"))?;
            let mut rest = m.clone();
            rest.remove("command");
            (name, rest)
        }
        other => {
            return Err(at(
                &path,
                format!("expected a command name or object, found {other}"),
            ))
        }
    };
    let mut obj = obj;
    let mut take = |key: &str| -> Result<String> {
        match obj.remove(key) {
            Some(Value::String(s)) => Ok(s),
            Some(other) => Err(at(
                format!("{path}.{key}"),
                format!("expected a section name, found {other}"),
            )),
            None => Err(at(&path, format!("`{name}` needs a `{key}` argument"))),
        }
    };
    let command = match name {
        "norms" => Command::Norms,
        "invert" => Command::Invert {
            section: take("section")?,
        },
        "perturb" => Command::Perturb {
            x: take("x")?,
            h: take("h")?,
        },
        "spectrum" => Command::Spectrum {
            section: take("section")?,
        },
        "reconstruct" => Command::Reconstruct,
        "gelfand-mazur" => Command::GelfandMazur,
        "reverse-bound" => Command::ReverseBound,
        "verify" => Command::Verify,
        other => {
            return Err(at(
                format!("{path}.command"),
                format!(
                    "unknown command `{other}` (expected one of {})",
                    Command::NAMES.join(", ")
                ),
            ))
        }
    };
    for (key, name) in command.references() {
        if !sections.iter().any(|(n, _)| n == name) {
            return Err(at(
                format!("{path}.{key}"),
                format!("no section named `{name}`"),
            ));
        }
    }
    let params: Params = serde_json::from_value(Value::Object(obj)).map_err(|e| at(&path, e))?;
    Ok(Step { command, params })
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let path = if path == "." { String::new() } else { path };
            at(
                format!(
                    "line {} column {}{}{}",
                    inner.line(),
                    inner.column(),
                    if path.is_empty() { "" } else { ", " },
                    path
                ),
                inner,
            )
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| at(path.display().to_string(), e))?;
        Self::from_json_str(&text)
    }

    fn from_raw(raw: RawScenario) -> Result<Self> {
        for (i, a) in raw.space.iter().enumerate() {
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(at(
                    format!("space[{i}].weight"),
                    format!("atom `{}` needs a positive weight", a.atom_id),
                ));
            }
        }
        let space =
            AtomicMeasureSpace::new(raw.space.iter().map(|a| (a.atom_id.clone(), a.weight)))
                .map_err(|e| at("space", e))?;
        for key in raw.bundle.keys() {
            if space.index_of(key).is_err() {
                return Err(at(
                    format!("bundle.{key}"),
                    format!("atom `{key}` is not in the space"),
                ));
            }
        }
        let fibers = space
            .atoms()
            .iter()
            .map(|atom| {
                let desc = raw.bundle.get(atom).ok_or_else(|| {
                    at("bundle", format!("no fiber descriptor for atom `{atom}`"))
                })?;
                parse_descriptor(desc).map_err(|e| at(format!("bundle.{atom}"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        let bundle = Bundle::new(&space, fibers).map_err(|e| at("bundle", e))?;

        let mut sections: Vec<(String, Section)> = Vec::with_capacity(raw.sections.len());
        for (i, s) in raw.sections.into_iter().enumerate() {
            let path = format!("sections[{i}]");
            if sections.iter().any(|(n, _)| *n == s.name) {
                return Err(at(
                    format!("{path}.name"),
                    format!("duplicate section name `{}`", s.name),
                ));
            }
            let section = Section::from_literal(&bundle, &s.values).map_err(|e| {
                at(
                    format!("{path}.values"),
                    format!("section `{}`: {e}", s.name),
                )
            })?;
            sections.push((s.name, section));
        }

        let steps = raw
            .commands
            .iter()
            .enumerate()
            .map(|(i, v)| parse_step(i, v, &sections))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario {
            space,
            bundle,
            sections,
            defaults: raw.defaults,
            steps,
        })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    /// The `{atom_id: descriptor}` map, in the form the loader accepts.
    pub fn bundle_json(bundle: &BundleRef) -> Value {
        let space = bundle.space();
        Value::Object(
            (0..space.len())
                .map(|i| {
                    (
                        space.atom(i).to_string(),
                        Value::String(bundle.fiber(i).to_string()),
                    )
                })
                .collect(),
        )
    }

    pub fn space_json(space: &SpaceRef) -> Value {
        Value::Array(
            (0..space.len())
                .map(|i| serde_json::json!({"atom_id": space.atom(i), "weight": space.weight(i)}))
                .collect(),
        )
    }

    /// Rebuild a bundle from the `space` and `bundle` fields of a report.
    pub fn bundle_from_json(space: &Value, bundle: &Value) -> Result<BundleRef> {
        let raw = RawScenario {
            space: serde_json::from_value(space.clone()).map_err(|e| at("space", e))?,
            bundle: bundle
                .as_object()
                .cloned()
                .ok_or_else(|| at("bundle", "expected an object"))?,
            sections: Vec::new(),
            defaults: Params::default(),
            commands: Vec::new(),
        };
        Ok(Self::from_raw(raw)?.bundle)
    }
}
