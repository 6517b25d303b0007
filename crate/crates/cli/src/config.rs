//! Run configuration files.

use std::path::{Path, PathBuf};

use gpcq_core::equations::reduce_general;
use gpcq_core::{Complex64, ComplexField, EquationSpec, GeneralCqParams, Grid, ReducedCq, StepConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::initial::{generate_initial, InitialData};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum EquationConfig {
    #[serde(rename = "GP4")]
    Gp4,
    #[serde(rename = "CQ3")]
    Cq3 { gamma: f64 },
    #[serde(rename = "EC")]
    Ec { n: usize },
    #[serde(rename = "GENERAL_CQ")]
    GeneralCq { alpha1: f64, alpha3: f64, alpha5: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteppingConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default = "one")]
    pub snapshot_stride: usize,
    #[serde(default)]
    pub dealias: bool,
    /// Blow-up threshold on `sup|v|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json_path: Option<PathBuf>,
    /// Binary snapshots of the run; fields are kept in memory only if set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_path: Option<PathBuf>,
    /// Report file for `compare`, `partition` and `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub interval: [f64; 2],
    /// Amplitude ladder; when present `v₀ = w₀ = a · initial_data`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
    /// Data for the critical run; defaults to `initial_data`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<InitialData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationConfig,
    pub grid: GridConfig,
    pub stepping: SteppingConfig,
    pub initial_data: InitialData,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionConfig>,
}

/// Everything needed to start a run.
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub spec: EquationSpec,
    pub reduction: Option<ReducedCq>,
    pub grid: Grid,
    pub step: StepConfig,
    pub v0: ComplexField,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn equation_spec(&self) -> Result<(EquationSpec, Option<ReducedCq>), CliError> {
        let cfg = |key: &str, e: gpcq_core::Error| CliError::Config(format!("at `equation{key}`: {e}"));
        match self.equation {
            EquationConfig::Gp4 => Ok((EquationSpec::Gp4, None)),
            EquationConfig::Cq3 { gamma } => Ok((EquationSpec::cq3(gamma).map_err(|e| cfg(".gamma", e))?, None)),
            EquationConfig::Ec { n } => Ok((EquationSpec::energy_critical(n).map_err(|e| cfg(".n", e))?, None)),
            EquationConfig::GeneralCq { alpha1, alpha3, alpha5 } => {
                let p = GeneralCqParams::new(alpha1, alpha3, alpha5).map_err(|e| cfg("", e))?;
                let red = reduce_general(&p).map_err(|e| cfg("", e))?;
                Ok((red.spec().map_err(|e| cfg("", e))?, Some(red)))
            }
        }
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid.n, self.grid.points, self.grid.length)
            .map_err(|e| CliError::Config(format!("at `grid`: {e}")))
    }

    pub fn step_config(&self, keep_fields: bool) -> Result<StepConfig, CliError> {
        let s = &self.stepping;
        let mut step = StepConfig::covering(s.t_final, s.dt, s.snapshot_stride)
            .map_err(|e| CliError::Config(format!("at `stepping`: {e}")))?
            .with_dealias(s.dealias)
            .with_keep_fields(keep_fields);
        if let Some(g) = s.guard {
            step.guard = g;
            step.validate().map_err(|e| CliError::Config(format!("at `stepping.guard`: {e}")))?;
        }
        Ok(step)
    }

    pub fn resolve(&self, keep_fields: bool) -> Result<ResolvedRun, CliError> {
        let (spec, reduction) = self.equation_spec()?;
        let grid = self.grid()?;
        if grid.dim() != spec.dim() {
            return Err(CliError::Config(format!(
                "at `grid.n`: {} needs n = {}, got {}",
                spec.label(),
                spec.dim(),
                grid.dim()
            )));
        }
        let step = self.step_config(keep_fields)?;
        let v0 = generate_initial(&self.initial_data, grid, self.seed)
            .map_err(|e| CliError::Config(format!("at `initial_data`: {e}")))?;
        Ok(ResolvedRun {
            spec,
            reduction,
            grid,
            step,
            v0,
        })
    }
}

/// `[re, im]` or a bare real number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "equation": {"kind": "CQ3", "gamma": 0.5},
        "grid": {"n": 3, "N": 8, "L": 8.0},
        "stepping": {"dt": 0.01, "T": 0.1, "snapshot_stride": 2},
        "initial_data": {"kind": "gaussian", "amplitude": [0.5, 0.1], "sigma": 1.0},
        "seed": 7
    }"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        let run = cfg.resolve(true).unwrap();
        assert_eq!(run.spec, EquationSpec::Cq3 { gamma: 0.5 });
        assert_eq!(run.step.n_steps, 10);
        assert!(!run.step.dealias);
        let echo = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&echo).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = BASE.replace("\"snapshot_stride\"", "\"snapshot_strid\"");
        let err = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("snapshot_strid"), "{err}");
        let text = BASE.replace("\"dt\": 0.01, ", "");
        let err = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("dt"), "{err}");
    }

    #[test]
    fn general_model_is_reduced() {
        let text = BASE.replace(
            r#"{"kind": "CQ3", "gamma": 0.5}"#,
            r#"{"kind": "GENERAL_CQ", "alpha1": 3.0, "alpha3": 4.0, "alpha5": 1.0}"#,
        );
        let cfg = RunConfig::from_json(&text).unwrap();
        let (spec, red) = cfg.equation_spec().unwrap();
        assert!((spec.gamma().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((red.unwrap().r0_sq - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_a_config_error() {
        let text = BASE.replace(r#""n": 3"#, r#""n": 4"#);
        let cfg = RunConfig::from_json(&text).unwrap();
        assert!(matches!(cfg.resolve(false), Err(CliError::Config(_))));
    }
}
