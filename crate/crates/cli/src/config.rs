//! Experiment configuration. Every summary embeds the config that produced
//! it, and `rodlab replay` reruns it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rodlab::critical::{family_point, make_critical, CriticalParams, FamilyParams};
use rodlab::variational::FlowParams;
use rodlab::QuatPath;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub grid_size: usize,
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CommandConfig {
    Family(FamilyConfig),
    Flow(FlowConfig),
    Classify(CurveConfig),
    Invariants(CurveConfig),
    Spectrum(SpectrumConfig),
    Export(ExportConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Family(_) => "family",
            CommandConfig::Flow(_) => "flow",
            CommandConfig::Classify(_) => "classify",
            CommandConfig::Invariants(_) => "invariants",
            CommandConfig::Spectrum(_) => "spectrum",
            CommandConfig::Export(_) => "export",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub h: i32,
    pub k: i32,
    pub u: Vec<f64>,
    pub tube_scale: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityChoice {
    Odd,
    Even,
    /// Drawn from the seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowInit {
    Random { parity: ParityChoice, max_freq: i32 },
    Curve(CurveSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub init: FlowInit,
    pub params: FlowParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub curve: CurveSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub c_max: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Obj,
    Pd,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportConfig {
    pub curve: CurveSpec,
    pub format: ExportFormat,
    pub tube_scale: f64,
}

/// A curve file: raw coefficients, normal-form parameters, or a family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSpec {
    QuatPath(QuatPath),
    Critical(CriticalParams),
    Family(FamilyParams),
}

impl CurveSpec {
    pub fn resolve(&self) -> CliResult<QuatPath> {
        Ok(match self {
            CurveSpec::QuatPath(q) => q.clone(),
            CurveSpec::Critical(p) => make_critical(p)?.into_inner(),
            CurveSpec::Family(fp) => family_point(fp)?.into_inner(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Reads a config, either bare or embedded in a summary under `"config"`.
pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    Ok(serde_json::from_value(value)?)
}
