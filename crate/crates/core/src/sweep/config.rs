//! TOML run configuration.
//!
//! ```toml
//! [model]
//! n_qubits = 8
//! n_tr = 50
//!
//! [cycle]
//! kind = "frequency_scaling"
//! omega_hot = 2.0
//! omega_cold = 1.0
//! lambda = 0.5
//! t_hot = 0.5
//! t_cold = 0.1
//!
//! [sweep]
//! outputs = ["regime", "work", "eta"]
//! csv = "out.csv"
//!
//! [[sweep.axes]]
//! name = "lambda"
//! min = 0.0
//! max = 3.0
//! count = 31
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cycle::{BathParams, CycleProtocol, LambdaMode, PopulationSource, ProtocolKind};
use crate::spectral::{Method, ModelParams, DEFAULT_N_TR};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default = "default_bath")]
    pub bath: BathParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

fn default_bath() -> BathParams {
    BathParams::at(0.0)
}

impl Default for Config {
    fn default() -> Self {
        Config {
            model: ModelSection::default(),
            bath: default_bath(),
            cycle: None,
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "one_qubit")]
    pub n_qubits: usize,
    #[serde(default = "default_n_tr")]
    pub n_tr: usize,
    /// Solver for spectra of this section; eigenvector observables always
    /// use the bare basis.
    #[serde(default)]
    pub method: Method,
}

fn one() -> f64 {
    1.0
}

fn one_qubit() -> usize {
    1
}

fn default_n_tr() -> usize {
    DEFAULT_N_TR
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            omega0: 1.0,
            delta: 1.0,
            lambda: 0.0,
            n_qubits: 1,
            n_tr: DEFAULT_N_TR,
            method: Method::Bare,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.omega0, self.delta, self.lambda, self.n_qubits, self.n_tr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKindName {
    FrequencyScaling,
    CouplingScaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleSection {
    pub kind: CycleKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_hot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_cold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub lambda_mode: LambdaMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_cold: Option<f64>,
    pub t_hot: f64,
    pub t_cold: f64,
    /// Solver for the endpoint energies.
    #[serde(default = "ecs")]
    pub method: Method,
    #[serde(default)]
    pub populations: PopulationSource,
}

fn ecs() -> Method {
    Method::Ecs
}

fn require(value: Option<f64>, key: &str) -> Result<f64> {
    value.ok_or_else(|| Error::config(format!("cycle.{key}"), "required for this cycle kind"))
}

fn forbid(value: Option<f64>, key: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::config(format!("cycle.{key}"), "not used by this cycle kind")),
        None => Ok(()),
    }
}

impl CycleSection {
    pub fn protocol(&self, model: &ModelSection, bath: &BathParams) -> Result<CycleProtocol> {
        let kind = match self.kind {
            CycleKindName::FrequencyScaling => {
                forbid(self.omega, "omega")?;
                forbid(self.lambda_hot, "lambda_hot")?;
                forbid(self.lambda_cold, "lambda_cold")?;
                ProtocolKind::FrequencyScaling {
                    omega_hot: require(self.omega_hot, "omega_hot")?,
                    omega_cold: require(self.omega_cold, "omega_cold")?,
                    lambda: require(self.lambda, "lambda")?,
                    lambda_mode: self.lambda_mode,
                }
            }
            CycleKindName::CouplingScaling => {
                forbid(self.omega_hot, "omega_hot")?;
                forbid(self.omega_cold, "omega_cold")?;
                forbid(self.lambda, "lambda")?;
                ProtocolKind::CouplingScaling {
                    omega: require(self.omega, "omega")?,
                    lambda_hot: require(self.lambda_hot, "lambda_hot")?,
                    lambda_cold: require(self.lambda_cold, "lambda_cold")?,
                }
            }
        };
        Ok(CycleProtocol {
            kind,
            n_qubits: model.n_qubits,
            n_tr: model.n_tr,
            t_hot: self.t_hot,
            t_cold: self.t_cold,
            method: self.method,
            populations: self.populations,
            alpha: bath.alpha,
            omega_co: bath.omega_co,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<AxisSection>,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Double `N_tr` per Hamiltonian until the low spectrum is converged.
    #[serde(default)]
    pub auto_converge: bool,
    /// Worker threads; zero uses all cores.
    #[serde(default)]
    pub threads: usize,
    /// Let correlation runs pick a smaller Fock cutoff.
    #[serde(default)]
    pub auto_cutoff: bool,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| {
            // Name the key on the offending line, else the first quoted name.
            let from_span = e.span().and_then(|span| {
                let start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
                let line = text[start..].lines().next()?;
                let (key, _) = line.split_once('=')?;
                Some(key.trim().to_string())
            });
            let key = from_span
                .or_else(|| e.message().split('`').nth(1).map(str::to_string))
                .unwrap_or_else(|| "<document>".into());
            Error::config(key, e.message().trim().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn protocol(&self) -> Result<Option<CycleProtocol>> {
        self.cycle.as_ref().map(|c| c.protocol(&self.model, &self.bath)).transpose()
    }
}
