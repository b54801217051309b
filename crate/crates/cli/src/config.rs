//! Experiment configuration: a TOML table with a `scenario` key, patched by
//! `key=value` overrides before it is deserialized.

use laguerre_dg::advection::Form;
use laguerre_dg::basis::BasisKind;
use laguerre_dg::quadrature::NodeKind;
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::scenario::{Convergence, CouplingValidation, GaussianAbsorption, Wavetrain};
use crate::CliError;

/// Largest Laguerre index the quadrature accepts.
pub const MAX_MODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormName {
    StrongCollocation,
    WeakNodal,
    WeakModal,
}

impl From<FormName> for Form {
    fn from(f: FormName) -> Self {
        match f {
            FormName::StrongCollocation => Form::StrongCollocation,
            FormName::WeakNodal => Form::WeakNodal,
            FormName::WeakModal => Form::WeakModal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Functions,
    Polynomials,
}

impl From<BasisName> for BasisKind {
    fn from(b: BasisName) -> Self {
        match b {
            BasisName::Functions => BasisKind::LaguerreFunctions,
            BasisName::Polynomials => BasisKind::LaguerrePolynomials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodesName {
    Gl,
    Glr,
}

impl From<NodesName> for NodeKind {
    fn from(n: NodesName) -> Self {
        match n {
            NodesName::Gl => NodeKind::Gl,
            NodesName::Glr => NodeKind::Glr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionName {
    Inflow,
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleParams {
    pub nodes: NodesName,
    #[serde(default = "polynomials")]
    pub basis: BasisName,
    pub beta: f64,
    pub modes: usize,
}

fn polynomials() -> BasisName {
    BasisName::Polynomials
}

fn glr() -> NodesName {
    NodesName::Glr
}

/// One advection variant. `direction` must agree with the sign of `velocity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorParams {
    pub form: FormName,
    pub basis: BasisName,
    /// Ignored by the modal form.
    #[serde(default = "glr")]
    pub nodes: NodesName,
    pub direction: DirectionName,
    pub beta: f64,
    pub modes: usize,
    pub velocity: f64,
    #[serde(default)]
    pub boundary_value: f64,
}

/// [`OperatorParams`] plus the stability tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub form: FormName,
    pub basis: BasisName,
    /// Ignored by the modal form.
    #[serde(default = "glr")]
    pub nodes: NodesName,
    pub direction: DirectionName,
    pub beta: f64,
    pub modes: usize,
    pub velocity: f64,
    #[serde(default)]
    pub boundary_value: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl SpectrumParams {
    pub fn operator(&self) -> OperatorParams {
        OperatorParams {
            form: self.form,
            basis: self.basis,
            nodes: self.nodes,
            direction: self.direction,
            beta: self.beta,
            modes: self.modes,
            velocity: self.velocity,
            boundary_value: self.boundary_value,
        }
    }
}

fn default_tol() -> f64 {
    laguerre_dg::spectrum::DEFAULT_STABILITY_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum Scenario {
    Rule(RuleParams),
    Operator(OperatorParams),
    Spectrum(SpectrumParams),
    CouplingValidation(CouplingValidation),
    Wavetrain(Wavetrain),
    GaussianAbsorption(GaussianAbsorption),
    Convergence(Convergence),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Recorded in the manifest; no scenario draws random numbers.
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub scenario: Scenario,
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self.scenario {
            Scenario::Rule(_) => "rule",
            Scenario::Operator(_) => "operator",
            Scenario::Spectrum(_) => "spectrum",
            Scenario::CouplingValidation(_) => "coupling_validation",
            Scenario::Wavetrain(_) => "wavetrain",
            Scenario::GaussianAbsorption(_) => "gaussian_absorption",
            Scenario::Convergence(_) => "convergence",
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match &self.scenario {
            Scenario::Rule(r) => check_laguerre(r.beta, r.modes),
            Scenario::Operator(o) => o.validate(),
            Scenario::Spectrum(s) => {
                if !(s.tol >= 0.0) {
                    return Err(CliError::Config("tol must be non-negative".into()));
                }
                s.operator().validate()
            }
            Scenario::CouplingValidation(c) => {
                check_laguerre(c.beta, c.modes)?;
                c.validate()
            }
            Scenario::Wavetrain(w) => {
                for r in &w.rows {
                    check_laguerre(r.beta, w.modes)?;
                }
                w.validate()
            }
            Scenario::GaussianAbsorption(g) => {
                for r in &g.rows {
                    check_laguerre(r.beta, r.modes)?;
                }
                g.validate()
            }
            Scenario::Convergence(c) => c.validate(),
        }
    }

    /// The fully resolved configuration, defaults included.
    pub fn manifest(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(format!("cannot serialize manifest: {e}")))
    }
}

impl OperatorParams {
    pub fn validate(&self) -> Result<(), CliError> {
        check_laguerre(self.beta, self.modes)?;
        let inflow = self.direction == DirectionName::Inflow;
        if self.velocity == 0.0 || !self.velocity.is_finite() || (self.velocity > 0.0) != inflow {
            return Err(CliError::Config(format!(
                "velocity {} does not match direction {:?} (inflow needs u > 0, outflow u < 0)",
                self.velocity, self.direction
            )));
        }
        Ok(())
    }
}

fn check_laguerre(beta: f64, modes: usize) -> Result<(), CliError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(CliError::Config(format!("beta must be positive, got {beta}")));
    }
    if modes > MAX_MODES {
        return Err(CliError::Config(format!("modes = {modes} exceeds {MAX_MODES}")));
    }
    Ok(())
}

/// Parses `text`, applies `overrides` in order, and deserializes.
pub fn load(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut root: Value = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    let cfg: ExperimentConfig = root
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Sets `key=value`, where `key` is a dotted path (array elements by index)
/// and `value` is any TOML value; bare words are taken as strings.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    let mut cur = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Table(t) => {
                if last {
                    t.insert((*part).to_string(), value);
                    return Ok(());
                }
                t.entry(part.to_string())
                    .or_insert_with(|| Value::Table(Default::default()))
            }
            Value::Array(a) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| CliError::Config(format!("`{part}` in `{key}` is not an index")))?;
                let len = a.len();
                let slot = a
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Config(format!("index {idx} in `{key}` out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::Config(format!("`{key}` descends into a scalar"))),
        };
    }
    unreachable!("loop returns on the last key part")
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
