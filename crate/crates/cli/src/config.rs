//! Scenario configuration documents.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use resonance::numerics::C64;

use crate::CliError;

pub const SCHEMA: &str = "resonance/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Pole,
    Survival,
    OracleCheck,
    Multipole,
    TwoPole,
    LeeFriedrichs,
    BasisConvergence,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Pole,
        Scenario::Survival,
        Scenario::OracleCheck,
        Scenario::Multipole,
        Scenario::TwoPole,
        Scenario::LeeFriedrichs,
        Scenario::BasisConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Pole => "pole",
            Scenario::Survival => "survival",
            Scenario::OracleCheck => "oracle_check",
            Scenario::Multipole => "multipole",
            Scenario::TwoPole => "two_pole",
            Scenario::LeeFriedrichs => "lee_friedrichs",
            Scenario::BasisConvergence => "basis_convergence",
        }
    }

    /// Tolerance keys the scenario can check.
    pub fn tolerance_keys(self) -> &'static [&'static str] {
        match self {
            Scenario::Pole => &["pole_gap"],
            Scenario::Survival => &["rate_rel", "khalfin_slope", "unit_modulus"],
            Scenario::OracleCheck => &["max_diff"],
            Scenario::Multipole => &["linearization_rel"],
            Scenario::TwoPole => &["tail_ratio", "timescale_ratio"],
            Scenario::LeeFriedrichs => &["closed_vs_series", "slope_rel", "gamma_identity"],
            Scenario::BasisConvergence => &["late_overlap", "initial_overlap"],
        }
    }
}

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn get(self) -> C64 {
        match self {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    ThresholdLorentzian,
    FlatCutoff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub omega0: f64,
    pub g: f64,
    pub omega_c: f64,
    #[serde(default)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub a: ComplexValue,
    pub b: ComplexValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<ComplexValue>,
    /// Fock cutoff; defaults to the Poisson ten-sigma rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveConfig {
    pub z0: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub c: ComplexValue,
    #[serde(default)]
    pub omega: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<ComplexValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeConfig>>,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

fn require<'a, T>(field: &str, value: &'a Option<T>) -> Result<&'a T, CliError> {
    value.as_ref().ok_or_else(|| invalid(format!("missing field `{field}`")))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model(&self) -> Result<&ModelConfig, CliError> {
        require("model", &self.model)
    }

    pub fn state(&self) -> Result<&StateConfig, CliError> {
        require("state", &self.state)
    }

    pub fn modes(&self) -> Result<&[ModeConfig], CliError> {
        require("modes", &self.modes).map(Vec::as_slice)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(invalid(format!("field `schema` must be \"{SCHEMA}\", got \"{}\"", self.schema)));
        }
        let t = &self.time;
        if t.samples < 2 {
            return Err(invalid(format!("field `time.samples` must be >= 2, got {}", t.samples)));
        }
        if !(t.t_start >= 0.0) || !t.t_start.is_finite() {
            return Err(invalid(format!("field `time.t_start` must be finite and >= 0, got {}", t.t_start)));
        }
        if !(t.t_end > t.t_start) || !t.t_end.is_finite() {
            return Err(invalid(format!("field `time.t_end` must be finite and > t_start, got {}", t.t_end)));
        }
        if t.spacing == Spacing::Log && t.t_start == 0.0 {
            return Err(invalid("field `time.t_start` must be > 0 for log spacing"));
        }
        for (key, value) in &self.tolerances {
            if !self.scenario.tolerance_keys().contains(&key.as_str()) {
                return Err(invalid(format!(
                    "field `tolerances.{key}` is not checked by scenario {} (known: {})",
                    self.scenario.name(),
                    self.scenario.tolerance_keys().join(", ")
                )));
            }
            if !(*value > 0.0) || !value.is_finite() {
                return Err(invalid(format!("field `tolerances.{key}` must be positive, got {value}")));
            }
        }
        if let Some(m) = &self.model {
            m.validate()?;
        }
        if let Some(s) = &self.state {
            s.validate()?;
        }
        if let Some(e) = &self.effective {
            let z0 = e.z0.get();
            if !(z0.im <= 0.0) {
                return Err(invalid(format!("field `effective.z0` must have Im <= 0, got {z0}")));
            }
        }
        if let Some(modes) = &self.modes {
            if modes.is_empty() {
                return Err(invalid("field `modes` must not be empty"));
            }
            for (k, m) in modes.iter().enumerate() {
                if !(m.gamma >= 0.0) || !m.gamma.is_finite() {
                    return Err(invalid(format!("field `modes[{k}].gamma` must be finite and >= 0, got {}", m.gamma)));
                }
            }
        }
        match self.scenario {
            Scenario::Pole | Scenario::Survival | Scenario::OracleCheck => {
                self.model()?;
            }
            Scenario::Multipole | Scenario::TwoPole => {
                let modes = self.modes()?;
                if self.scenario == Scenario::TwoPole && modes.len() != 2 {
                    return Err(invalid(format!("field `modes` must hold exactly 2 poles, got {}", modes.len())));
                }
            }
            Scenario::LeeFriedrichs | Scenario::BasisConvergence => {
                self.state()?;
                if self.effective.is_none() && self.model.is_none() {
                    return Err(invalid("missing field `effective` (or a `model` to derive z0 from)"));
                }
            }
        }
        if self.scenario == Scenario::OracleCheck {
            require("model.modes", &self.model()?.modes)?;
            require("model.omega_max", &self.model()?.omega_max)?;
        }
        Ok(())
    }
}

impl ModelConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(invalid(format!("field `model.omega0` must be positive, got {}", self.omega0)));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(invalid(format!("field `model.g` must be >= 0, got {}", self.g)));
        }
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(invalid(format!("field `model.omega_c` must be positive, got {}", self.omega_c)));
        }
        if let Some(w) = self.omega_max {
            if !(w > 0.0) || !w.is_finite() {
                return Err(invalid(format!("field `model.omega_max` must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

impl StateConfig {
    fn validate(&self) -> Result<(), CliError> {
        match (self.alpha2, self.l0) {
            (Some(_), Some(_)) => Err(invalid("fields `state.alpha2` and `state.l0` are mutually exclusive")),
            (None, None) => Err(invalid("missing field `state.alpha2` (or `state.l0` with `state.mass_omega`)")),
            (None, Some(l0)) => {
                let mw = *require("state.mass_omega", &self.mass_omega)?;
                if !(mw > 0.0) || !(l0 >= 0.0) {
                    return Err(invalid(format!("fields `state.mass_omega` > 0 and `state.l0` >= 0 required, got {mw}, {l0}")));
                }
                Ok(())
            }
            (Some(_), None) => Ok(()),
        }
    }
}

/// Sample times described by a [`TimeConfig`].
pub fn time_grid(t: &TimeConfig) -> Vec<f64> {
    let n = t.samples - 1;
    (0..=n)
        .map(|k| {
            let u = k as f64 / n as f64;
            match t.spacing {
                Spacing::Linear => t.t_start + (t.t_end - t.t_start) * u,
                Spacing::Log => t.t_start * (t.t_end / t.t_start).powf(u),
            }
        })
        .collect()
}
