//! Scenario runner for Banach–Kantorovich algebra analyses.
//!
//! Exit codes: 0 when every command passes, 1 when an assertion fails or a
//! precondition does not hold, 2 on usage, I/O or parse errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bkalg::runner::{self, Report};
use bkalg::scenario::{Command, Params, Scenario, Step};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct Flags {
    /// Numerical tolerance [default: 1e-8]
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Random samples per property [default: 500]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Seed for the ChaCha8 stream [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on enumerated spm selections [default: 4096]
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    report: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Flags {
    fn params(&self) -> Params {
        Params {
            tolerance: self.tolerance,
            samples: self.samples,
            seed: self.seed,
            cap: self.cap,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bkalg",
    version,
    about = "Analyses of Banach–Kantorovich algebras over finite atomic spaces"
)]
struct Cli {
    #[command(subcommand)]
    action: Action,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Action {
    /// Run the scenario's own command list
    Run { scenario: PathBuf },
    /// Atomwise norms of every named section
    Norms { scenario: PathBuf },
    /// Certified inverse of a named section
    Invert { scenario: PathBuf, section: String },
    /// Perturbation bound for x + h
    Perturb {
        scenario: PathBuf,
        x: String,
        h: String,
    },
    /// Fiber spectra, spm enumeration and its property suite
    Spectrum { scenario: PathBuf, section: String },
    /// Rebuild the bundle from the named sections
    Reconstruct { scenario: PathBuf },
    /// Unit-support Gelfand–Mazur checker
    GelfandMazur { scenario: PathBuf },
    /// Reverse-bound Gelfand–Mazur checker
    ReverseBound { scenario: PathBuf },
    /// Every module's property suite
    Verify { scenario: PathBuf },
    /// Re-verify the witnesses embedded in a JSON report
    Replay {
        #[arg(value_name = "REPORT")]
        path: PathBuf,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("bkalg: {msg}");
    ExitCode::from(2)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), ExitCode> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| usage_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_scenario(path: &Path, command: Option<Command>, flags: &Flags) -> ExitCode {
    let scenario = match Scenario::load(path) {
        Ok(s) => s,
        Err(e) => return usage_error(format!("{}: {e}", path.display())),
    };
    if let Some(Command::Invert { section } | Command::Spectrum { section }) = &command {
        if scenario.section(section).is_none() {
            return usage_error(format!("no section named `{section}`"));
        }
    }
    if let Some(Command::Perturb { x, h }) = &command {
        for name in [x, h] {
            if scenario.section(name).is_none() {
                return usage_error(format!("no section named `{name}`"));
            }
        }
    }
    let steps: Option<Vec<Step>> = command.map(|command| {
        vec![Step {
            command,
            params: Params::default(),
        }]
    });
    let report: Report = runner::run(
        &scenario,
        &path.display().to_string(),
        flags.params(),
        steps.as_deref(),
    );
    let text = match flags.report {
        Format::Json => {
            serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n"
        }
        Format::Text => report.to_text(),
    };
    if let Err(code) = emit(&text, flags.out.as_deref()) {
        return code;
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn replay(path: &Path, flags: &Flags) -> ExitCode {
    let value: serde_json::Value = match std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
    {
        Ok(v) => v,
        Err(e) => return usage_error(format!("{}: {e}", path.display())),
    };
    let entries = match runner::replay(&value) {
        Ok(e) => e,
        Err(e) => return usage_error(format!("{}: {e}", path.display())),
    };
    let ok = entries.iter().all(|e| e.reproduced);
    let text = match flags.report {
        Format::Json => {
            let v = serde_json::json!({ "schema": runner::SCHEMA_VERSION, "reproduced": ok, "witnesses": entries });
            serde_json::to_string_pretty(&v).expect("serializes") + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let mark = if e.reproduced { "ok  " } else { "FAIL" };
                s += &format!(
                    "{mark} {} {} {}: {}\n",
                    e.command, e.location, e.witness, e.detail
                );
            }
            s += &format!(
                "{} witnesses, {}\n",
                entries.len(),
                if ok {
                    "all reproduced"
                } else {
                    "NOT reproduced"
                }
            );
            s
        }
    };
    if let Err(code) = emit(&text, flags.out.as_deref()) {
        return code;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = &cli.flags;
    match cli.action {
        Action::Run { scenario } => run_scenario(&scenario, None, flags),
        Action::Norms { scenario } => run_scenario(&scenario, Some(Command::Norms), flags),
        Action::Invert { scenario, section } => {
            run_scenario(&scenario, Some(Command::Invert { section }), flags)
        }
        Action::Perturb { scenario, x, h } => {
            run_scenario(&scenario, Some(Command::Perturb { x, h }), flags)
        }
        Action::Spectrum { scenario, section } => {
            run_scenario(&scenario, Some(Command::Spectrum { section }), flags)
        }
        Action::Reconstruct { scenario } => {
            run_scenario(&scenario, Some(Command::Reconstruct), flags)
        }
        Action::GelfandMazur { scenario } => {
            run_scenario(&scenario, Some(Command::GelfandMazur), flags)
        }
        Action::ReverseBound { scenario } => {
            run_scenario(&scenario, Some(Command::ReverseBound), flags)
        }
        Action::Verify { scenario } => run_scenario(&scenario, Some(Command::Verify), flags),
        Action::Replay { path } => replay(&path, flags),
    }
}
