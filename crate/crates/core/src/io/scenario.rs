use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

use crate::dynamics::InitialState;
use crate::error::{Error, Result};
use crate::models::{default_truncation, ModelKind, ModelSpec};
use crate::protocols::find_barrier;

pub const SCHEMA_VERSION: u32 = 1;

/// One config-file frequency unit (2π·kHz) in rad/s.
pub const KHZ: f64 = TAU * 1e3;

/// Largest truncation a scenario may request or imply (dense matrices).
pub const MAX_N_MAX: usize = 2000;

/// Largest level searched for an f1 barrier when picking a truncation.
const BARRIER_SEARCH: usize = 200;

/// A runnable experiment as written in a scenario file.
///
/// Frequencies are kept in the file's units (2π·kHz) so that a parsed
/// scenario serializes back to the same values; [`ModelConfig::to_spec`]
/// converts to rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub model: ModelConfig,
    pub initial: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<LindbladConfig>,
    pub times: TimesConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default)]
    pub eta: f64,
    /// Ignored for `TwoTone`, where `g = ηΩ/2`.
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub omega_r: f64,
    #[serde(default)]
    pub omega0_r: f64,
    #[serde(default)]
    pub rabi: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub delta_r: f64,
    #[serde(default)]
    pub delta_b: f64,
    /// Radians.
    #[serde(default)]
    pub phi_r: f64,
    #[serde(default)]
    pub phi_b: f64,
    /// Move η onto the nearest f1 root (see `protocols::find_barrier`).
    #[serde(default)]
    pub refine_eta: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    /// Decay rate of σ⁻ in units of g.
    pub gamma_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    /// In units of 2π/g.
    pub t_end: f64,
    pub n_points: usize,
    /// Optional RK4 step cap for master-equation runs, in units of 2π/g.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    /// Times (2π/g units) at which full phonon distributions are written.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Rerun at `n_max + 20` and compare.
    #[serde(default = "yes")]
    pub check_convergence: bool,
}

fn yes() -> bool {
    true
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n_max: None,
            check_convergence: true,
        }
    }
}

impl ModelConfig {
    /// Model in angular units (rad/s).
    pub fn to_spec(&self) -> ModelSpec {
        let k = |x: f64| x * KHZ;
        if self.kind == ModelKind::TwoTone {
            let mut s = ModelSpec::two_tone(
                self.eta,
                k(self.rabi),
                k(self.nu),
                k(self.delta_r),
                k(self.delta_b),
            );
            s.phi_r = self.phi_r;
            s.phi_b = self.phi_b;
            return s;
        }
        ModelSpec {
            kind: self.kind,
            eta: self.eta,
            g: k(self.g),
            omega_r: k(self.omega_r),
            omega0_r: k(self.omega0_r),
            rabi: k(self.rabi),
            nu: k(self.nu),
            delta_r: k(self.delta_r),
            delta_b: k(self.delta_b),
            phi_r: self.phi_r,
            phi_b: self.phi_b,
        }
    }
}

/// Model and truncation after η refinement and default sizing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedModel {
    pub spec: ModelSpec,
    pub eta_requested: f64,
    pub barrier: Option<usize>,
    pub n_max: usize,
}

impl Scenario {
    /// Angular coupling used as the time unit (`2π/g`).
    pub fn coupling(&self) -> f64 {
        self.model.to_spec().coupling()
    }

    /// Semantic checks beyond the file schema. Returns model warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let schema = |key: &str, message: String| Error::Schema {
            key: Some(key.into()),
            message,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(schema(
                "name",
                "must be non-empty and free of path separators".into(),
            ));
        }
        if !(self.times.t_end > 0.0) || !self.times.t_end.is_finite() {
            return Err(schema("times.t_end", "must be positive".into()));
        }
        if self.times.n_points < 2 {
            return Err(schema("times.n_points", "must be at least 2".into()));
        }
        if let Some(dt) = self.times.dt_max {
            if !(dt > 0.0) {
                return Err(schema("times.dt_max", "must be positive".into()));
            }
        }
        if self
            .outputs
            .snapshots
            .iter()
            .any(|t| !(*t >= 0.0 && *t <= self.times.t_end))
        {
            return Err(schema(
                "outputs.snapshots",
                "times must lie in [0, t_end]".into(),
            ));
        }
        if let Some(l) = &self.lindblad {
            if !(l.gamma_ratio >= 0.0) || !l.gamma_ratio.is_finite() {
                return Err(schema(
                    "lindblad.gamma_ratio",
                    "must be non-negative".into(),
                ));
            }
        }
        if let Some(n) = self.truncation.n_max {
            if n == 0 || n > MAX_N_MAX {
                return Err(schema(
                    "truncation.n_max",
                    format!("must be in 1..={MAX_N_MAX}"),
                ));
            }
        }
        let too_big = match self.initial {
            InitialState::Fock { n, .. } => n > MAX_N_MAX / 2,
            InitialState::Coherent {
                alpha_re, alpha_im, ..
            } => !(alpha_re.hypot(alpha_im) <= (MAX_N_MAX as f64 / 4.0).sqrt()),
            InitialState::Thermal { nbar, .. } => !(nbar >= 0.0 && nbar <= MAX_N_MAX as f64 / 40.0),
        };
        if too_big {
            return Err(schema(
                "initial",
                format!("state does not fit below n_max = {MAX_N_MAX}"),
            ));
        }
        let spec = self.model.to_spec();
        if !(spec.coupling() > 0.0) {
            return Err(schema(
                "model.g",
                "coupling must be positive (it sets the time unit)".into(),
            ));
        }
        spec.validate().map_err(|e| schema("model", e.to_string()))
    }

    /// Applies η refinement and picks the truncation.
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let mut spec = self.model.to_spec();
        let eta_requested = spec.eta;
        let mut barrier = None;
        if spec.kind.is_nonlinear() {
            let search = self.truncation.n_max.unwrap_or(BARRIER_SEARCH);
            if let Some((n, root)) = find_barrier(spec.eta, search) {
                barrier = Some(n);
                if self.model.refine_eta {
                    spec.eta = root;
                    if spec.kind == ModelKind::TwoTone {
                        spec.g = spec.eta * spec.rabi / 2.0;
                    }
                }
            } else if self.model.refine_eta {
                return Err(Error::NoBarrier {
                    eta: spec.eta,
                    n_max: search,
                });
            }
        }
        let n_max = self.truncation.n_max.unwrap_or_else(|| {
            default_truncation(&spec, self.initial.alpha_abs(), barrier)
                .max(self.initial.required_n_max())
        });
        Ok(ResolvedModel {
            spec,
            eta_requested,
            barrier,
            n_max,
        })
    }
}

/// Parses and validates scenario text. `origin` is used in messages only.
pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| diagnose(text, &e))?;
    match table.get("schema_version") {
        None => {
            return Err(Error::Schema {
                key: Some("schema_version".into()),
                message: "missing required key".into(),
            })
        }
        Some(toml::Value::Integer(v)) if *v != SCHEMA_VERSION as i64 => {
            return Err(Error::SchemaVersion {
                found: u32::try_from(*v).unwrap_or(u32::MAX),
                expected: SCHEMA_VERSION,
            })
        }
        _ => {}
    }
    let scenario: Scenario = toml::from_str(text).map_err(|e| diagnose(text, &e))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_str(&text).map_err(|e| match e {
        Error::Schema { key, message } => Error::Schema {
            key,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Scenario as TOML text; `parse_scenario_str(&emit_scenario(s)) == s`.
pub fn emit_scenario(scenario: &Scenario) -> Result<String> {
    toml::to_string_pretty(scenario).map_err(|e| Error::Schema {
        key: None,
        message: e.to_string(),
    })
}

fn diagnose(text: &str, err: &toml::de::Error) -> Error {
    let message = err.message().trim().to_string();
    let location = err.span().map(|span| {
        let before = &text[..span.start.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        format!("line {line}, column {col}: ")
    });
    let key = message
        .split('`')
        .nth(1)
        .filter(|_| message.contains("field"))
        .map(str::to_string);
    Error::Schema {
        key,
        message: format!("{}{message}", location.unwrap_or_default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG4: &str = r#"
schema_version = 1
name = "fig4"

[model]
kind = "NonlinearQRM"
eta = 0.67898
g = 45.24
omega_r = 11.31
refine_eta = true

[initial]
type = "fock"
n = 0
qubit = "down"

[times]
t_end = 20.0
n_points = 401
"#;

    #[test]
    fn parses_and_converts_units() {
        let s = parse_scenario_str(FIG4).unwrap();
        assert_eq!(s.model.kind, ModelKind::NonlinearQRM);
        let spec = s.model.to_spec();
        assert!((spec.g - 45.24 * TAU * 1e3).abs() < 1e-6);
        assert!((spec.g / spec.omega_r - 4.0).abs() < 1e-12);
        assert!(s.truncation.check_convergence);
        let r = s.resolve().unwrap();
        assert_eq!(r.barrier, Some(7));
        assert!(r.n_max >= 84);
        assert!((r.spec.eta - 0.67898).abs() < 5e-5 && r.spec.eta != 0.67898);
    }

    #[test]
    fn round_trip() {
        let s = parse_scenario_str(FIG4).unwrap();
        let text = emit_scenario(&s).unwrap();
        assert_eq!(parse_scenario_str(&text).unwrap(), s);
    }

    #[test]
    fn empty_file_is_a_schema_error() {
        let e = parse_scenario_str("").unwrap_err();
        assert_eq!(e.class(), crate::ErrorClass::Schema);
    }

    #[test]
    fn version_mismatch() {
        let text = FIG4.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(
            parse_scenario_str(&text),
            Err(Error::SchemaVersion { found: 2, .. })
        ));
    }

    #[test]
    fn unknown_key_is_located() {
        let text = FIG4.replace("omega_r = 11.31", "omega_r = 11.31\nomgea0_r = 0.0");
        match parse_scenario_str(&text).unwrap_err() {
            Error::Schema { key, message } => {
                assert_eq!(key.as_deref(), Some("omgea0_r"));
                assert!(message.contains("line 10"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let text = FIG4.replace("n_points = 401", "n_points = 1");
        assert!(
            matches!(parse_scenario_str(&text), Err(Error::Schema { key: Some(k), .. }) if k == "times.n_points")
        );
        let text = FIG4.replace("g = 45.24\n", "");
        assert!(parse_scenario_str(&text).is_err());
        let text = FIG4.replace("type = \"fock\"", "type = \"squeezed\"");
        assert!(parse_scenario_str(&text).is_err());
    }

    #[test]
    fn two_tone_units() {
        let text = r#"
schema_version = 1
name = "tt"
[model]
kind = "TwoTone"
eta = 0.67898
rabi = 133.26
nu = 5000.0
delta_r = 11.31
delta_b = -11.31
[initial]
type = "fock"
n = 0
qubit = "down"
[times]
t_end = 1.0
n_points = 11
"#;
        let s = parse_scenario_str(text).unwrap();
        let spec = s.model.to_spec();
        assert!((spec.g / spec.omega_r - 4.0).abs() < 1e-4);
        assert_eq!(spec.omega0_r, 0.0);
    }
}
