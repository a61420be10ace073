//! Executes scenario commands and assembles the versioned report.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bundle::{BundleRef, Section};
use crate::error::{Error, Result};
use crate::gelfand_mazur::{gm_reverse_bound_check, gm_unit_support_check, GmVerdict, Witness};
use crate::inversion::{exact_inverse, neumann_inverse, perturbed_inverse};
use crate::measure::EFunction;
use crate::random::Rng;
use crate::representation::reconstruct_bundle;
use crate::scenario::{Command, Params, Scenario, Settings, Step};
use crate::spectrum::{spectrum_table, spm_enumerate, spm_properties};
use crate::suite::{verify_all, SuiteConfig, BOUND_SLACK};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "bkalg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Generators drawn when a scenario defines no sections.
const RANDOM_GENERATORS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The command's hypothesis does not hold for the given input.
    PreconditionFailed,
    Error,
}

impl Status {
    pub fn ok(self) -> bool {
        self == Status::Pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandReport {
    pub index: usize,
    pub command: String,
    pub args: Value,
    pub settings: Settings,
    pub status: Status,
    pub summary: String,
    pub elapsed_ms: f64,
    pub result: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub seed: u64,
    pub passed: bool,
    pub space: Value,
    pub bundle: Value,
    pub commands: Vec<CommandReport>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}  scenario {}  seed {}",
            self.tool, self.version, self.scenario, self.seed
        );
        let width = self
            .commands
            .iter()
            .map(|c| c.command.len())
            .max()
            .unwrap_or(0);
        for c in &self.commands {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::PreconditionFailed => "PRECONDITION",
                Status::Error => "ERROR",
            };
            let _ = writeln!(
                out,
                "  {:<width$}  {:<12}  {:>9.1} ms  {}",
                c.command, status, c.elapsed_ms, c.summary
            );
        }
        let passed = self.commands.iter().filter(|c| c.status.ok()).count();
        let _ = writeln!(
            out,
            "{} ({passed}/{} commands)",
            if self.passed { "pass" } else { "FAIL" },
            self.commands.len()
        );
        out
    }
}

/// Strip timing fields, for comparing two runs.
pub fn without_timing(mut report: Value) -> Value {
    if let Some(cmds) = report.get_mut("commands").and_then(Value::as_array_mut) {
        for c in cmds {
            if let Some(obj) = c.as_object_mut() {
                obj.remove("elapsed_ms");
            }
        }
    }
    report
}

fn per_atom(f: &EFunction) -> Value {
    let space = f.space();
    Value::Object(
        (0..space.len())
            .map(|i| {
                let z = f.at(i);
                let v = if z.im == 0.0 {
                    json!(z.re)
                } else {
                    json!([z.re, z.im])
                };
                (space.atom(i).to_string(), v)
            })
            .collect(),
    )
}

struct Outcome {
    status: Status,
    summary: String,
    result: Value,
}

impl Outcome {
    fn from_error(e: Error) -> Self {
        let status = match e {
            Error::NotInvertible { .. } | Error::Precondition { .. } | Error::SeriesCap { .. } => {
                Status::PreconditionFailed
            }
            _ => Status::Error,
        };
        Outcome {
            status,
            summary: e.to_string(),
            result: json!({ "error": e.to_string() }),
        }
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn norms(scenario: &Scenario) -> Outcome {
    let mut result = Map::new();
    for (name, s) in &scenario.sections {
        result.insert(
            name.clone(),
            json!({ "norm": per_atom(&s.norm()), "sup": s.norm().max_abs() }),
        );
    }
    Outcome {
        status: Status::Pass,
        summary: format!("{} sections", scenario.sections.len()),
        result: Value::Object(result),
    }
}

fn invert(x: &Section, s: &Settings) -> Result<Outcome> {
    let cert = exact_inverse(x, s.tolerance)?;
    let mut ok = cert.verify(BOUND_SLACK).is_ok();
    let mut result = json!({ "exact": cert.to_json() });

    // x = e − (e − x): the Neumann series applies where ‖e − x‖ < 1
    let e = Section::unit(x.bundle());
    let y = e.sub(x)?;
    let q = y.norm();
    let summary;
    if (0..q.space().len()).all(|i| q.at(i).re < 1.0) {
        let series = neumann_inverse(&y, s.tolerance);
        match series {
            Ok(n) => {
                let gap = n.inverse.distance(&cert.inverse)?;
                let agrees = gap.max_abs() <= 2.0 * s.tolerance.max(cert.residual.max_abs());
                ok &= agrees && n.verify(BOUND_SLACK).is_ok();
                summary = format!(
                    "residual {:.1e}, Neumann agrees within {:.1e}",
                    cert.residual.max_abs(),
                    gap.max_abs()
                );
                result["neumann"] = n.to_json();
                result["neumann"]["gap"] = per_atom(&gap);
            }
            Err(err) => {
                summary = format!(
                    "residual {:.1e}, Neumann skipped: {err}",
                    cert.residual.max_abs()
                );
                result["neumann"] = json!({ "skipped": err.to_string() });
            }
        }
    } else {
        summary = format!(
            "residual {:.1e}, ‖e − x‖ ≥ 1 somewhere",
            cert.residual.max_abs()
        );
        result["neumann"] = json!({ "skipped": "‖e − x‖ ≥ 1 at some atom" });
    }
    Ok(Outcome {
        status: pass_if(ok),
        summary,
        result,
    })
}

fn perturb(x: &Section, h: &Section, s: &Settings) -> Result<Outcome> {
    let cert = perturbed_inverse(x, h, s.tolerance)?;
    let ok = cert.verify(BOUND_SLACK).is_ok();
    let slack = cert
        .bound_slack
        .values()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        status: pass_if(ok),
        summary: format!("min bound slack {slack:.3e}"),
        result: cert.to_json(),
    })
}

fn spectrum(x: &Section, s: &Settings, rng: &mut Rng) -> Result<Outcome> {
    let table = spectrum_table(x, s.tolerance)?;
    let enumeration = spm_enumerate(&table, s.cap)?;
    let report = spm_properties(x, s.samples, s.tolerance, s.cap, rng)?;
    let members: Vec<Value> = enumeration.members.iter().map(per_atom).collect();
    Ok(Outcome {
        status: pass_if(report.passed()),
        summary: format!(
            "{} of {} selections{}",
            enumeration.members.len(),
            enumeration.total,
            if enumeration.truncated {
                " (truncated)"
            } else {
                ""
            }
        ),
        result: json!({
            "fiber_spectra": table.to_json(),
            "spm": {
                "total": enumeration.total,
                "truncated": enumeration.truncated,
                "members": members,
            },
            "checks": report.checks(),
        }),
    })
}

fn reconstruct(scenario: &Scenario, s: &Settings, rng: &mut Rng) -> Result<Outcome> {
    let mut gens: Vec<Section> = scenario.sections.iter().map(|(_, x)| x.clone()).collect();
    let random = gens.is_empty();
    if random {
        gens = (0..RANDOM_GENERATORS)
            .map(|_| rng.section(&scenario.bundle))
            .collect();
    }
    let (target, _, report) = reconstruct_bundle(&gens, s.samples, rng)?;
    Ok(Outcome {
        status: pass_if(report.passed()),
        summary: format!(
            "{} {} generators, fibers {}",
            gens.len(),
            if random { "random" } else { "named" },
            target
                .fibers()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        ),
        result: json!({
            "generators": if random { "random" } else { "sections" },
            "bundle": Scenario::bundle_json(&target),
            "fibers": report.fibers,
            "checks": report.checks,
        }),
    })
}

fn gm(verdict: GmVerdict) -> Outcome {
    let mut summary = verdict.outcome.label().to_string();
    if !verdict.parts.is_empty() {
        let n = verdict.parts.len();
        let _ = write!(summary, ", {n} part{}", if n == 1 { "" } else { "s" });
    }
    Outcome {
        status: pass_if(verdict.is_sound()),
        summary,
        result: verdict.to_json(),
    }
}

fn verify(bundle: &BundleRef, s: &Settings, rng: &Rng) -> Outcome {
    let config = SuiteConfig {
        samples: s.samples,
        tolerance: s.tolerance,
        cap: s.cap,
    };
    let reports = verify_all(bundle, config, rng);
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.passed())
                .map(move |c| format!("{}: {}", r.module, c.name))
        })
        .collect();
    let modules: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "module": r.module, "passed": r.passed(), "checks": r.checks }))
        .collect();
    Outcome {
        status: pass_if(failed.is_empty()),
        summary: if failed.is_empty() {
            format!("{total} properties hold")
        } else {
            format!(
                "{} of {total} properties failed: {}",
                failed.len(),
                failed.join("; ")
            )
        },
        result: json!({ "modules": modules }),
    }
}

fn execute(scenario: &Scenario, step: &Step, s: &Settings, index: usize) -> Outcome {
    let rng = Rng::new(s.seed).stream(index as u64);
    let section = |name: &str| scenario.section(name).expect("validated at load");
    let result = match &step.command {
        Command::Norms => Ok(norms(scenario)),
        Command::Invert { section: x } => invert(section(x), s),
        Command::Perturb { x, h } => perturb(section(x), section(h), s),
        Command::Spectrum { section: x } => spectrum(section(x), s, &mut rng.clone()),
        Command::Reconstruct => reconstruct(scenario, s, &mut rng.clone()),
        Command::GelfandMazur => {
            gm_unit_support_check(&scenario.bundle, s.samples, s.tolerance, &mut rng.clone())
                .map(gm)
        }
        Command::ReverseBound => {
            gm_reverse_bound_check(&scenario.bundle, s.samples, s.tolerance, &mut rng.clone())
                .map(gm)
        }
        Command::Verify => Ok(verify(&scenario.bundle, s, &rng)),
    };
    result.unwrap_or_else(Outcome::from_error)
}

/// Run `steps` (or the scenario's own commands) with `cli` overriding the
/// scenario defaults; per-command parameters override both.
pub fn run(scenario: &Scenario, name: &str, cli: Params, steps: Option<&[Step]>) -> Report {
    let global = cli.over(scenario.defaults);
    let steps = steps.unwrap_or(&scenario.steps);
    let commands: Vec<CommandReport> = steps
        .iter()
        .enumerate()
        .map(|(index, step)| {
            let settings = step.params.over(global).resolve();
            let start = Instant::now();
            let outcome = execute(scenario, step, &settings, index);
            CommandReport {
                index,
                command: step.command.to_string(),
                args: step.command.args_json(),
                settings,
                status: outcome.status,
                summary: outcome.summary,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                result: outcome.result,
            }
        })
        .collect();
    Report {
        schema: SCHEMA_VERSION,
        tool: TOOL,
        version: VERSION,
        scenario: name.to_string(),
        seed: global.resolve().seed,
        passed: commands.iter().all(|c| c.status.ok()),
        space: Scenario::space_json(&scenario.space),
        bundle: Scenario::bundle_json(&scenario.bundle),
        commands,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayEntry {
    pub command: String,
    /// `parts[k]` for a per-part witness, empty for the global one.
    pub location: String,
    pub witness: String,
    pub reproduced: bool,
    pub detail: String,
}

/// Re-verify every witness embedded in a report.
pub fn replay(report: &Value) -> Result<Vec<ReplayEntry>> {
    let field = |key: &str| {
        report.get(key).ok_or_else(|| Error::Scenario {
            path: key.into(),
            message: "missing from report".into(),
        })
    };
    match field("schema")?.as_u64() {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => {
            return Err(Error::Scenario {
                path: "schema".into(),
                message: format!("unsupported report schema {other:?}"),
            })
        }
    }
    let bundle = Scenario::bundle_from_json(field("space")?, field("bundle")?)?;
    let commands = field("commands")?
        .as_array()
        .ok_or_else(|| Error::Scenario {
            path: "commands".into(),
            message: "expected an array".into(),
        })?;
    let mut entries = Vec::new();
    for (ci, c) in commands.iter().enumerate() {
        let name = c
            .get("command")
            .and_then(Value::as_str)
            .unwrap_or("?")
            .to_string();
        let tol = c
            .pointer("/settings/tolerance")
            .and_then(Value::as_f64)
            .unwrap_or(crate::scenario::DEFAULT_TOLERANCE);
        let Some(result) = c.get("result") else {
            continue;
        };
        let mut found: Vec<(String, &Value)> = Vec::new();
        if let Some(w) = result.get("witness") {
            found.push((String::new(), w));
        }
        if let Some(parts) = result.get("parts").and_then(Value::as_array) {
            for (k, p) in parts.iter().enumerate() {
                if let Some(w) = p.get("witness") {
                    found.push((format!("parts[{k}]"), w));
                }
            }
        }
        for (location, w) in found {
            let kind = w
                .get("type")
                .and_then(Value::as_str)
                .unwrap_or("?")
                .to_string();
            let (reproduced, detail) = match Witness::replay(&bundle, w, tol) {
                Ok(_) => (true, "counterexample".to_string()),
                Err(e) => (false, e.to_string()),
            };
            entries.push(ReplayEntry {
                command: format!("commands[{ci}] {name}"),
                location,
                witness: kind,
                reproduced,
                detail,
            });
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(bundle: &str, commands: &str) -> Scenario {
        Scenario::from_json_str(&format!(
            r#"{{
                "space": [{{"atom_id": "a", "weight": 1}}, {{"atom_id": "b", "weight": 1}}],
                "bundle": {bundle},
                "sections": [
                    {{"name": "x", "values": {{"a": [[0.5, 0], [0, 0], [0, 0], [2, 0]], "b": [[1, 0], [1, 0], [0, 0], [1, 0]]}}}},
                    {{"name": "h", "values": {{"a": [[0.01, 0], [0, 0], [0, 0], [0, 0]], "b": [[0, 0], [0, 0], [0.01, 0], [0, 0]]}}}},
                    {{"name": "s", "values": {{"a": [[0, 0], [0, 0], [0, 0], [1, 0]], "b": [[1, 0], [0, 0], [0, 0], [1, 0]]}}}}
                ],
                "defaults": {{"samples": 30}},
                "commands": {commands}
            }}"#
        ))
        .unwrap()
    }

    const M2: &str = r#"{"a": "matrix(2)", "b": "matrix(2)"}"#;

    #[test]
    fn runs_every_command() {
        let sc = scenario(
            M2,
            r#"["norms", {"command": "invert", "section": "x"}, {"command": "perturb", "x": "x", "h": "h"},
                {"command": "spectrum", "section": "x"}, "reconstruct", "gelfand-mazur", "reverse-bound", "verify"]"#,
        );
        let report = run(&sc, "inline", Params::default(), None);
        for c in &report.commands {
            assert_eq!(c.status, Status::Pass, "{}: {}", c.command, c.summary);
        }
        assert!(report.passed);
        assert_eq!(report.commands[5].result["outcome"], "counterexample");
        assert_eq!(report.commands[6].result["outcome"], "counterexample");
        let replayed = replay(&report.to_json()).unwrap();
        assert!(replayed.len() >= 2);
        assert!(replayed.iter().all(|r| r.reproduced));
    }

    #[test]
    fn singular_input_is_a_precondition_failure() {
        let sc = scenario(M2, r#"[{"command": "invert", "section": "s"}]"#);
        let report = run(&sc, "inline", Params::default(), None);
        assert_eq!(report.commands[0].status, Status::PreconditionFailed);
        assert!(
            report.commands[0].summary.contains('a'),
            "{}",
            report.commands[0].summary
        );
        assert!(!report.passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let sc = scenario(
            M2,
            r#"["reverse-bound", {"command": "spectrum", "section": "x"}]"#,
        );
        let a = without_timing(run(&sc, "inline", Params::default(), None).to_json());
        let b = without_timing(run(&sc, "inline", Params::default(), None).to_json());
        assert_eq!(a, b);
        assert_eq!(a["schema"], 1);
    }

    #[test]
    fn layering_of_parameters() {
        let sc = scenario(M2, r#"["norms", {"command": "norms", "samples": 7}]"#);
        let cli = Params {
            samples: Some(11),
            seed: Some(3),
            ..Params::default()
        };
        let report = run(&sc, "inline", cli, None);
        assert_eq!(report.seed, 3);
        assert_eq!(report.commands[0].settings.samples, 11);
        assert_eq!(report.commands[1].settings.samples, 7);
        assert!(report.to_text().contains("pass (2/2 commands)"));
    }
}
