//! Configuration-driven runner around the `resonance` library.

pub mod config;
pub mod output;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use config::{Scenario, ScenarioConfig};
use output::{write_atomic, Check};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("scenario {scenario}: {message}")]
    Scenario { scenario: &'static str, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

pub const DEFAULT_OUT: &str = "resonance-out";

/// Everything a run produced; `passed` is false when any requested tolerance failed.
#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub report: Value,
    pub passed: bool,
}

/// Parses `KEY=VAL` tolerance overrides.
pub fn parse_tolerance(arg: &str) -> Result<(String, f64), CliError> {
    let (key, value) = arg
        .split_once('=')
        .ok_or_else(|| CliError::ConfigInvalid(format!("--tol expects KEY=VAL, got `{arg}`")))?;
    let value: f64 =
        value.parse().map_err(|_| CliError::ConfigInvalid(format!("--tol {key}: `{value}` is not a number")))?;
    Ok((key.to_string(), value))
}

pub fn run(config_path: &Path, out: Option<&Path>, overrides: &[(String, f64)]) -> Result<RunSummary, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let mut cfg = ScenarioConfig::parse(&text)?;
    for (key, value) in overrides {
        cfg.tolerances.insert(key.clone(), *value);
    }
    cfg.validate()?;
    run_config(&cfg, out)
}

pub fn run_config(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<RunSummary, CliError> {
    let out_dir = out.map(Path::to_path_buf).or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| DEFAULT_OUT.into());
    let start = Instant::now();
    let outcome = scenarios::run(cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let checks: Vec<Check> = cfg
        .tolerances
        .iter()
        .map(|(key, &tolerance)| {
            let value = outcome.measured.get(key.as_str()).copied().unwrap_or(f64::NAN);
            Check { key: key.clone(), value, tolerance, pass: value <= tolerance }
        })
        .collect();
    let passed = checks.iter().all(|c| c.pass);

    let mut report = json!({
        "schema": config::SCHEMA,
        "scenario": cfg.scenario.name(),
        "config": cfg,
        "quantities": outcome.quantities.0,
    });
    if !checks.is_empty() {
        report["checks"] = serde_json::to_value(&checks).expect("checks serialize");
        report["passed"] = Value::from(passed);
    }
    report["wall_time_s"] = Value::from(elapsed);

    write_atomic(&out_dir.join("series.csv"), outcome.table.to_csv().as_bytes())?;
    let pretty = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&out_dir.join("report.json"), format!("{pretty}\n").as_bytes())?;
    Ok(RunSummary { out_dir, report, passed })
}

fn describe(s: Scenario) -> (&'static str, &'static str, &'static str) {
    match s {
        Scenario::Pole => (
            "resonance pole of the level-continuum model, second-order and exact",
            "decay of an unstable level",
            "model{omega0,g,omega_c}, time",
        ),
        Scenario::Survival => (
            "survival amplitude with pole/background split, exponential and power-law fits",
            "decay of an unstable level; long-time tail",
            "model{omega0,g,omega_c}, time",
        ),
        Scenario::OracleCheck => (
            "discretized-continuum dynamics against the continuum quadrature",
            "decay of an unstable level",
            "model{omega0,g,omega_c,modes,omega_max}, time",
        ),
        Scenario::Multipole => (
            "finite mode sum: effective rate, time scales, slow/fast split",
            "relaxation and decoherence times",
            "modes[{c,omega,gamma}], time",
        ),
        Scenario::TwoPole => (
            "two-pole sum with the four-product coherence and its time scales",
            "relaxation and decoherence times",
            "modes[2 x {c,omega,gamma}], time",
        ),
        Scenario::LeeFriedrichs => (
            "two-packet superposition: coherence decay, closed form and series",
            "decoherence of coherent-state superpositions",
            "state{a,b,alpha2 | mass_omega,l0}, effective{z0} | model, time",
        ),
        Scenario::BasisConvergence => (
            "moving eigenbasis of the reduced density against the preferred one",
            "decoherence of coherent-state superpositions",
            "state{a,b,alpha2 | mass_omega,l0}, effective{z0} | model, time",
        ),
    }
}

pub fn list_scenarios() -> String {
    let mut out = String::new();
    for s in Scenario::ALL {
        let (what, topic, fields) = describe(s);
        out.push_str(&format!("{}\n  {what}\n  topic: {topic}\n  requires: {fields}\n", s.name()));
        out.push_str(&format!("  tolerances: {}\n", s.tolerance_keys().join(", ")));
    }
    out
}
