//! Scenario files: schema, loading and validation.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use spinqdd::fields::{FieldSpec, Grid2D, PGrid, ScalarField, SpinField};
use spinqdd::fluid::{FluidParams, ModelKind};
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{file}: {path}: {message}")]
    Schema { file: String, path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn invalid(path: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { path: path.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Local,
    SpinVector,
    TwoComponent,
    Entropic,
    Kinetic,
    NonlocalRhsProbe,
}

impl ModelChoice {
    pub fn fluid_kind(self) -> Option<ModelKind> {
        match self {
            Self::Local => Some(ModelKind::Local),
            Self::SpinVector => Some(ModelKind::SpinVector),
            Self::TwoComponent => Some(ModelKind::TwoComponent),
            Self::Entropic => Some(ModelKind::Entropic),
            Self::Kinetic | Self::NonlocalRhsProbe => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// IMEX-SSP3(4,3,3) for the fluid models.
    ImexSsp3,
    /// Strang splitting for the kinetic model.
    Strang,
}

/// Periodic torus [0, lx) × [0, ly) with nx × ny nodes (powers of two, ≥ 16).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "two_pi")]
    pub lx: f64,
    #[serde(default = "two_pi")]
    pub ly: f64,
}

fn two_pi() -> f64 {
    TAU
}

/// Dimensionless parameters; the collision time τ0 of the scaling is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    /// Scaled Planck constant.
    pub eps: f64,
    /// Rashba coupling strength.
    pub alpha: f64,
    /// Relaxation time of the hydrodynamic scaling.
    pub tau: f64,
    /// Drops the ε³ terms of the local model.
    #[serde(default)]
    pub drop_eps3: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub n0: FieldSpec,
    #[serde(default)]
    pub n: [FieldSpec; 3],
    /// Multiplies n0 by exp(−V).
    #[serde(default)]
    pub boltzmann: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between CSV rows.
    #[serde(default = "one")]
    pub output_every: usize,
    /// Steps between field snapshots; 0 writes only the initial and final fields.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KineticSpec {
    pub np: usize,
    pub pmax: f64,
    #[serde(default = "one")]
    pub closure_order: usize,
}

impl Default for KineticSpec {
    fn default() -> Self {
        Self { np: 64, pmax: 8.0, closure_order: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    pub params: ParamSpec,
    #[serde(default)]
    pub potential: FieldSpec,
    pub initial: InitialSpec,
    pub integrator: IntegratorSpec,
    pub model: ModelChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic: Option<KineticSpec>,
}

/// The JSON schema of scenario files.
pub fn schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(Scenario)
}

impl Scenario {
    pub fn from_json(text: &str, file: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Self = serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Schema {
            file: file.into(),
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn grid(&self) -> Result<Grid2D, ScenarioError> {
        let g = &self.grid;
        Grid2D::new(g.nx, g.ny, g.lx, g.ly).map_err(|e| invalid("grid", e.to_string()))
    }

    pub fn potential_field(&self) -> Result<ScalarField, ScenarioError> {
        Ok(self.potential.build(self.grid()?))
    }

    pub fn initial_state(&self) -> Result<SpinField, ScenarioError> {
        let g = self.grid()?;
        let mut n0 = self.initial.n0.build(g);
        if self.initial.boltzmann {
            let v = self.potential_field()?;
            n0 = n0.zip_map(&v, |a, b| a * (-b).exp());
        }
        let n = [0, 1, 2].map(|j| self.initial.n[j].build(g));
        Ok(SpinField::new(n0, n, self.params.eps))
    }

    pub fn fluid_params(&self) -> Result<FluidParams, ScenarioError> {
        let p = &self.params;
        let mut fp = FluidParams::new(p.eps, p.alpha, p.tau, self.potential_field()?);
        fp.drop_eps3 = p.drop_eps3;
        Ok(fp)
    }

    pub fn kinetic_spec(&self) -> KineticSpec {
        self.kinetic.clone().unwrap_or_default()
    }

    pub fn pgrid(&self) -> Result<PGrid, ScenarioError> {
        let k = self.kinetic_spec();
        PGrid::new(k.np, k.pmax).map_err(|e| invalid("kinetic", e.to_string()))
    }

    /// Semantic checks beyond the schema: grid, parameters, resolved modes,
    /// physical initial data and a scheme matching the model.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(invalid("name", "must be non-empty and use only [A-Za-z0-9_-]"));
        }
        let g = self.grid()?;
        let p = &self.params;
        for (name, v) in [("eps", p.eps), ("alpha", p.alpha), ("tau", p.tau)] {
            if !v.is_finite() {
                return Err(invalid(&format!("params.{name}"), "must be finite"));
            }
        }
        if p.eps < 0.0 {
            return Err(invalid("params.eps", "must be non-negative"));
        }
        if p.tau <= 0.0 {
            return Err(invalid("params.tau", "must be positive"));
        }
        let fields = [("potential", &self.potential), ("initial.n0", &self.initial.n0)]
            .into_iter()
            .chain([0, 1, 2].map(|j| (["initial.n[0]", "initial.n[1]", "initial.n[2]"][j], &self.initial.n[j])));
        for (path, f) in fields {
            f.validate(&g).map_err(|e| invalid(path, e.to_string()))?;
        }
        let it = &self.integrator;
        if !(it.dt > 0.0 && it.dt.is_finite()) {
            return Err(invalid("integrator.dt", "must be positive"));
        }
        if !(it.t_end > 0.0 && it.t_end.is_finite()) {
            return Err(invalid("integrator.t_end", "must be positive"));
        }
        if it.output_every == 0 {
            return Err(invalid("integrator.output_every", "must be at least 1"));
        }
        let expected = if self.model == ModelChoice::Kinetic { Scheme::Strang } else { Scheme::ImexSsp3 };
        if it.scheme != expected {
            return Err(invalid("integrator.scheme", format!("{:?} model needs {expected:?}", self.model)));
        }
        if self.model == ModelChoice::Kinetic {
            let k = self.kinetic_spec();
            self.pgrid()?;
            if !matches!(k.closure_order, 1 | 3) {
                return Err(invalid("kinetic.closure_order", "must be 1 or 3"));
            }
            if it.dt > 0.5 * p.tau {
                return Err(invalid("integrator.dt", "kinetic runs need dt <= tau/2"));
            }
        }
        if self.model == ModelChoice::NonlocalRhsProbe && p.eps <= 0.0 {
            return Err(invalid("params.eps", "nonlocal_rhs_probe needs eps > 0"));
        }
        let n = self.initial_state()?;
        if n.n0.min() <= 0.0 {
            return Err(invalid("initial.n0", "must be positive everywhere"));
        }
        if !n.is_physical() {
            return Err(invalid(
                "initial.n",
                format!("eps |n| < n0 violated (max eps|n|/n0 = {:.4})", p.eps * n.max_spin_ratio()),
            ));
        }
        if self.model == ModelChoice::TwoComponent && (n.n[0].max_abs() > 0.0 || n.n[1].max_abs() > 0.0) {
            return Err(invalid("initial.n", "two_component model needs n1 = n2 = 0"));
        }
        if self.model == ModelChoice::Entropic && n.n.iter().any(|f| f.max_abs() > 0.0) {
            return Err(invalid("initial.n", "entropic model is spinless"));
        }
        Ok(())
    }

    /// Sets a named parameter (`eps`, `alpha`, `tau`, `dt`, `t_end`).
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, ScenarioError> {
        let mut s = self.clone();
        match name {
            "eps" => s.params.eps = value,
            "alpha" => s.params.alpha = value,
            "tau" => s.params.tau = value,
            "dt" => s.integrator.dt = value,
            "t_end" => s.integrator.t_end = value,
            _ => return Err(invalid("param", format!("unknown sweep parameter {name:?}"))),
        }
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t",
        "grid": {"nx": 16, "ny": 16},
        "params": {"eps": 0.1, "alpha": 0.2, "tau": 1.0},
        "initial": {"n0": {"constant": 1.0}},
        "integrator": {"scheme": "imex_ssp3", "dt": 0.01, "t_end": 0.1},
        "model": "local"
    }"#;

    #[test]
    fn minimal_scenario_loads() {
        let s = Scenario::from_json(MINIMAL, "t.json").unwrap();
        assert_eq!(s.grid.lx, TAU);
        assert_eq!(s.integrator.output_every, 1);
    }

    #[test]
    fn schema_errors_carry_the_field_path() {
        let bad = MINIMAL.replace(r#""tau": 1.0"#, r#""tau": "x""#);
        let err = Scenario::from_json(&bad, "t.json").unwrap_err().to_string();
        assert!(err.contains("params.tau"), "{err}");
        let unknown = MINIMAL.replace(r#""alpha": 0.2"#, r#""alpha": 0.2, "beta": 1"#);
        assert!(Scenario::from_json(&unknown, "t.json").unwrap_err().to_string().contains("beta"));
    }

    #[test]
    fn unphysical_initial_data_is_rejected() {
        let bad = MINIMAL
            .replace(r#""n0": {"constant": 1.0}"#, r#""n0": {"constant": 1.0}, "n": [{"constant": 20.0}, {}, {}]"#);
        let err = Scenario::from_json(&bad, "t.json").unwrap_err().to_string();
        assert!(err.starts_with("initial.n"), "{err}");
    }

    #[test]
    fn scheme_must_match_model() {
        let bad = MINIMAL.replace("imex_ssp3", "strang");
        assert!(Scenario::from_json(&bad, "t.json").unwrap_err().to_string().contains("integrator.scheme"));
    }
}
