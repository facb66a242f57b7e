//! Batch evaluation over parameter grids.
//!
//! A [`SweepSpec`] is a base [`Config`] plus up to a few axes. Each grid
//! cell applies its axis values to the base, then evaluates the requested
//! cycle and correlation outputs. Endpoint energies are computed once per
//! distinct Hamiltonian and shared between cells. Failures are recorded per
//! cell.
//!
//! Correlation outputs are evaluated on the cold-stroke Hamiltonian at
//! `t_cold` when a `[cycle]` section is present, and on `[model]` at
//! `bath.temperature` otherwise.

mod config;
mod grid;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{AxisSection, Config, CycleKindName, CycleSection, ModelSection, Scale, SweepSection};
pub use grid::{emit_csv, emit_json, load_json, AxisMeta, CellRecord, PhaseGrid, Provenance, SCHEMA_VERSION};

use crate::correlations::{correlation_report, CorrelationOptions};
use crate::cycle::{self, cycle_from_energies, CycleProtocol, LambdaMode, PopulationSource, ProtocolKind};
use crate::spectral::{self, Method, ModelParams, DEGENERACY_GAP};
use crate::{Error, Result};

/// Maximum `N_tr` doublings in auto-converge mode.
pub const MAX_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Lambda,
    LambdaHot,
    LambdaCold,
    THot,
    TCold,
    Temperature,
    NQubits,
    OmegaHot,
    OmegaCold,
    OmegaRatio,
}

impl AxisName {
    pub const ALL: [AxisName; 10] = [
        AxisName::Lambda,
        AxisName::LambdaHot,
        AxisName::LambdaCold,
        AxisName::THot,
        AxisName::TCold,
        AxisName::Temperature,
        AxisName::NQubits,
        AxisName::OmegaHot,
        AxisName::OmegaCold,
        AxisName::OmegaRatio,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::Lambda => "lambda",
            AxisName::LambdaHot => "lambda_hot",
            AxisName::LambdaCold => "lambda_cold",
            AxisName::THot => "t_hot",
            AxisName::TCold => "t_cold",
            AxisName::Temperature => "temperature",
            AxisName::NQubits => "n_qubits",
            AxisName::OmegaHot => "omega_hot",
            AxisName::OmegaCold => "omega_cold",
            AxisName::OmegaRatio => "omega_ratio",
        }
    }
}

impl FromStr for AxisName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown axis `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Regime,
    Work,
    QHot,
    QCold,
    Eta,
    Cop,
    CarnotEta,
    CarnotCop,
    G2,
    G2Generalized,
    Negativity,
    MeanPhoton,
}

impl Output {
    pub const ALL: [Output; 12] = [
        Output::Regime,
        Output::Work,
        Output::QHot,
        Output::QCold,
        Output::Eta,
        Output::Cop,
        Output::CarnotEta,
        Output::CarnotCop,
        Output::G2,
        Output::G2Generalized,
        Output::Negativity,
        Output::MeanPhoton,
    ];

    /// Outputs of `phase-diagram` when none are configured.
    pub const PHASE_DIAGRAM: [Output; 6] = [
        Output::Regime,
        Output::Work,
        Output::QHot,
        Output::QCold,
        Output::Eta,
        Output::Cop,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Output::Regime => "regime",
            Output::Work => "work",
            Output::QHot => "q_hot",
            Output::QCold => "q_cold",
            Output::Eta => "eta",
            Output::Cop => "cop",
            Output::CarnotEta => "carnot_eta",
            Output::CarnotCop => "carnot_cop",
            Output::G2 => "g2",
            Output::G2Generalized => "g2_generalized",
            Output::Negativity => "negativity",
            Output::MeanPhoton => "mean_photon",
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(
            self,
            Output::Regime | Output::Work | Output::QHot | Output::QCold | Output::Eta | Output::Cop | Output::CarnotEta | Output::CarnotCop
        )
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Output::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| format!("unknown output `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub scale: Scale,
    pub values: Vec<f64>,
}

impl Axis {
    fn from_section(section: &AxisSection, index: usize) -> Result<Axis> {
        let key = |field: &str| format!("sweep.axes[{index}].{field}");
        let name = section.name.parse::<AxisName>().map_err(|e| Error::config(key("name"), e))?;
        if section.count < 1 {
            return Err(Error::config(key("count"), "must be at least 1"));
        }
        if !(section.min.is_finite() && section.max.is_finite()) {
            return Err(Error::config(key("min"), "bounds must be finite"));
        }
        if section.scale == Scale::Log && !(section.min > 0.0 && section.max > 0.0) {
            return Err(Error::config(key("scale"), "log axes need positive bounds"));
        }
        let n = section.count;
        let t = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let values: Vec<f64> = (0..n)
            .map(|i| match section.scale {
                Scale::Linear if i + 1 == n && n > 1 => section.max,
                Scale::Linear => section.min + (section.max - section.min) * t(i),
                Scale::Log => (section.min.ln() + (section.max.ln() - section.min.ln()) * t(i)).exp(),
            })
            .collect();
        if name == AxisName::NQubits && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(Error::config(key("name"), "n_qubits axis must take positive integer values"));
        }
        Ok(Axis {
            name,
            scale: section.scale,
            values,
        })
    }
}

/// Validated sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub config: Config,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Output>,
    pub threads: usize,
    pub auto_converge: bool,
    pub auto_cutoff: bool,
}

impl SweepSpec {
    pub fn from_config(config: &Config) -> Result<SweepSpec> {
        let section = config
            .sweep
            .as_ref()
            .ok_or_else(|| Error::config("sweep", "missing [sweep] section"))?;
        let axes = section
            .axes
            .iter()
            .enumerate()
            .map(|(i, a)| Axis::from_section(a, i))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = BTreeSet::new();
        for (i, a) in axes.iter().enumerate() {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::config(format!("sweep.axes[{i}].name"), "axis repeated"));
            }
        }
        let outputs = section
            .outputs
            .iter()
            .map(|o| o.parse::<Output>().map_err(|e| Error::config("sweep.outputs", e)))
            .collect::<Result<Vec<_>>>()?;
        if outputs.is_empty() {
            return Err(Error::config("sweep.outputs", "at least one output is required"));
        }
        let spec = SweepSpec {
            config: config.clone(),
            axes,
            outputs,
            threads: section.threads,
            auto_converge: section.auto_converge,
            auto_cutoff: section.auto_cutoff,
        };
        spec.check_applicable()?;
        Ok(spec)
    }

    fn needs_cycle(&self) -> bool {
        self.outputs.iter().any(Output::is_cycle)
    }

    fn check_applicable(&self) -> Result<()> {
        let cycle = self.config.cycle.as_ref();
        if self.needs_cycle() && cycle.is_none() {
            return Err(Error::config("cycle", "cycle outputs need a [cycle] section"));
        }
        if let Some(c) = cycle {
            c.protocol(&self.config.model, &self.config.bath)?;
        }
        for (i, axis) in self.axes.iter().enumerate() {
            let key = format!("sweep.axes[{i}].name");
            let kind = cycle.map(|c| c.kind);
            let ok = match axis.name {
                AxisName::Lambda => kind != Some(CycleKindName::CouplingScaling),
                AxisName::LambdaHot | AxisName::LambdaCold => kind == Some(CycleKindName::CouplingScaling),
                AxisName::THot | AxisName::TCold => kind.is_some(),
                AxisName::Temperature => kind.is_none(),
                AxisName::NQubits => true,
                AxisName::OmegaHot | AxisName::OmegaCold | AxisName::OmegaRatio => kind == Some(CycleKindName::FrequencyScaling),
            };
            if !ok {
                return Err(Error::config(key, format!("axis `{}` does not apply to this configuration", axis.name.as_str())));
            }
        }
        if self.axes.iter().any(|a| a.name == AxisName::OmegaRatio)
            && self.axes.iter().any(|a| a.name == AxisName::OmegaHot)
        {
            return Err(Error::config("sweep.axes", "omega_ratio and omega_hot both set the hot frequency"));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of cell `index`, last axis fastest.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            coords[i] = axis.values[rest % n];
            rest /= n;
        }
        coords
    }

    /// Base configuration with the axis values of one cell applied.
    pub fn cell_config(&self, coords: &[f64]) -> Config {
        let mut c = self.config.clone();
        let mut ratio = None;
        for (axis, &v) in self.axes.iter().zip(coords) {
            match axis.name {
                AxisName::Lambda => {
                    c.model.lambda = v;
                    if let Some(cy) = c.cycle.as_mut() {
                        cy.lambda = Some(v);
                    }
                }
                AxisName::NQubits => c.model.n_qubits = v as usize,
                AxisName::Temperature => c.bath.temperature = v,
                AxisName::OmegaRatio => ratio = Some(v),
                name => {
                    let cy = c.cycle.as_mut().expect("checked cycle axis");
                    match name {
                        AxisName::LambdaHot => cy.lambda_hot = Some(v),
                        AxisName::LambdaCold => cy.lambda_cold = Some(v),
                        AxisName::THot => cy.t_hot = v,
                        AxisName::TCold => cy.t_cold = v,
                        AxisName::OmegaHot => cy.omega_hot = Some(v),
                        AxisName::OmegaCold => cy.omega_cold = Some(v),
                        _ => unreachable!(),
                    }
                }
            }
        }
        if let (Some(r), Some(cy)) = (ratio, c.cycle.as_mut()) {
            cy.omega_hot = cy.omega_cold.map(|w| w * r);
        }
        c
    }
}

/// Cache key: bit patterns of the Hamiltonian parameters plus solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct HamiltonianKey([u64; 3], usize, usize, bool);

impl HamiltonianKey {
    fn new(p: &ModelParams, method: Method) -> Self {
        HamiltonianKey(
            [p.omega0.to_bits(), p.delta.to_bits(), p.lambda.to_bits()],
            p.n_qubits,
            p.n_tr,
            method == Method::Ecs,
        )
    }
}

type EnergyCache = HashMap<HamiltonianKey, std::result::Result<(Vec<f64>, usize), String>>;

fn solve_energies(p: &ModelParams, method: Method, auto_converge: bool) -> Result<(Vec<f64>, usize)> {
    if auto_converge {
        let c = spectral::converged_energies(p, method, MAX_DOUBLINGS)?;
        Ok((c.energies, c.n_tr))
    } else {
        Ok((spectral::energies(p, method)?, p.n_tr))
    }
}

fn cycle_endpoints(proto: &CycleProtocol) -> [(ModelParams, Method); 2] {
    [(proto.hot_params(), proto.method), (proto.cold_params(), proto.method)]
}

fn near_degenerate(energies: &[f64], t: f64) -> bool {
    let e0 = energies[0];
    energies
        .windows(2)
        .take_while(|w| (-(w[0] - e0) / t).exp() > cycle::POPULATION_FLOOR)
        .any(|w| w[1] - w[0] < DEGENERACY_GAP)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn evaluate_cycle(proto: &CycleProtocol, cache: &EnergyCache, auto_converge: bool, record: &mut CellRecord) -> Result<()> {
    proto.validate()?;
    let result = if proto.populations == PopulationSource::RateEquation {
        record.n_tr = Some(proto.n_tr);
        cycle::run_cycle(proto)?
    } else {
        let [hot, cold] = cycle_endpoints(proto);
        let lookup = |(p, m): (ModelParams, Method)| -> Result<(Vec<f64>, usize)> {
            match cache.get(&HamiltonianKey::new(&p, m)) {
                Some(Ok(v)) => Ok(v.clone()),
                Some(Err(e)) => Err(Error::param("spectrum", e.clone())),
                None => solve_energies(&p, m, auto_converge),
            }
        };
        let (mut eh, nh) = lookup(hot)?;
        let (mut ec, nc) = lookup(cold)?;
        let n_tr = nh.max(nc);
        if nh != nc {
            eh = spectral::energies(&hot.0.with_n_tr(n_tr), hot.1)?;
            ec = spectral::energies(&cold.0.with_n_tr(n_tr), cold.1)?;
        }
        record.n_tr = Some(n_tr);
        if near_degenerate(&eh, proto.t_hot) || near_degenerate(&ec, proto.t_cold) {
            record.flags.push("near_degenerate".into());
        }
        cycle_from_energies(&eh, &ec, proto.t_hot, proto.t_cold)?
    };
    record.regime = Some(result.regime);
    record.work = Some(result.work);
    record.q_hot = Some(result.q_hot);
    record.q_cold = Some(result.q_cold);
    record.eta = result.eta;
    record.cop = result.cop;
    record.carnot_eta = finite(result.carnot_eta);
    record.carnot_cop = finite(result.carnot_cop);
    Ok(())
}

fn evaluate_correlations(config: &Config, proto: Option<&CycleProtocol>, auto_cutoff: bool, record: &mut CellRecord) -> Result<()> {
    let (p, t) = match proto {
        Some(proto) => (proto.cold_params(), proto.t_cold),
        None => (config.model.params(), config.bath.temperature),
    };
    let opts = CorrelationOptions {
        auto_cutoff,
        ..CorrelationOptions::default()
    };
    let r = correlation_report(&p, t, &opts)?;
    record.g2 = r.g2_conventional;
    record.g2_generalized = r.g2_generalized;
    record.negativity = Some(r.negativity);
    record.mean_photon = Some(r.mean_photon);
    record.fock_cutoff = Some(r.fock_cutoff);
    if r.flags.vacuum_dominated {
        record.flags.push("vacuum_dominated".into());
    }
    if r.flags.emission_vacuum_dominated {
        record.flags.push("emission_vacuum_dominated".into());
    }
    if r.flags.antibunched {
        record.flags.push("antibunched".into());
    }
    Ok(())
}

fn evaluate_cell(spec: &SweepSpec, index: usize, cache: &EnergyCache) -> CellRecord {
    let coords = spec.coordinates(index);
    let mut record = CellRecord::new(coords.clone());
    let config = spec.cell_config(&coords);
    let outcome = (|| -> Result<()> {
        config.model.params().validate()?;
        let proto = config.protocol()?;
        if spec.needs_cycle() {
            let proto = proto.as_ref().expect("checked cycle section");
            evaluate_cycle(proto, cache, spec.auto_converge, &mut record)?;
        }
        if spec.outputs.iter().any(|o| !o.is_cycle()) {
            evaluate_correlations(&config, proto.as_ref(), spec.auto_cutoff, &mut record)?;
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record
}

fn build_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))
}

/// Evaluate every cell of the grid. The result is independent of the
/// thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<PhaseGrid> {
    let pool = build_pool(spec.threads)?;
    let cells = spec.cell_count();
    let mut keys = BTreeMap::new();
    if spec.needs_cycle() {
        for index in 0..cells {
            let config = spec.cell_config(&spec.coordinates(index));
            if let Ok(Some(proto)) = config.protocol() {
                if proto.validate().is_ok() && proto.populations == PopulationSource::Gibbs {
                    for (p, m) in cycle_endpoints(&proto) {
                        keys.insert(HamiltonianKey::new(&p, m), (p, m));
                    }
                }
            }
        }
    }
    let keys: Vec<_> = keys.into_iter().map(|(k, (p, m))| (k, p, m)).collect();
    let (cache, records) = pool.install(|| {
        let cache: EnergyCache = keys
            .par_iter()
            .map(|(k, p, m)| (*k, solve_energies(p, *m, spec.auto_converge).map_err(|e| e.to_string())))
            .collect();
        let records: Vec<CellRecord> = (0..cells)
            .into_par_iter()
            .map(|i| evaluate_cell(spec, i, &cache))
            .collect();
        (cache, records)
    });
    let mut n_tr_used: Vec<usize> = cache.values().filter_map(|r| r.as_ref().ok().map(|v| v.1)).collect();
    n_tr_used.extend(records.iter().filter_map(|r| r.n_tr.or(r.fock_cutoff)));
    n_tr_used.sort_unstable();
    n_tr_used.dedup();
    Ok(PhaseGrid::new(spec, records, n_tr_used))
}

/// Frequency-scaling protocol helper used by the CLI and tests.
pub fn frequency_cycle_section(omega_hot: f64, omega_cold: f64, lambda: f64, t_hot: f64, t_cold: f64) -> CycleSection {
    CycleSection {
        kind: CycleKindName::FrequencyScaling,
        omega_hot: Some(omega_hot),
        omega_cold: Some(omega_cold),
        lambda: Some(lambda),
        lambda_mode: LambdaMode::Absolute,
        omega: None,
        lambda_hot: None,
        lambda_cold: None,
        t_hot,
        t_cold,
        method: Method::Ecs,
        populations: PopulationSource::Gibbs,
    }
}

impl From<&CycleProtocol> for CycleSection {
    fn from(p: &CycleProtocol) -> Self {
        let mut section = frequency_cycle_section(0.0, 0.0, 0.0, p.t_hot, p.t_cold);
        section.method = p.method;
        section.populations = p.populations;
        match p.kind {
            ProtocolKind::FrequencyScaling {
                omega_hot,
                omega_cold,
                lambda,
                lambda_mode,
            } => {
                section.omega_hot = Some(omega_hot);
                section.omega_cold = Some(omega_cold);
                section.lambda = Some(lambda);
                section.lambda_mode = lambda_mode;
            }
            ProtocolKind::CouplingScaling {
                omega,
                lambda_hot,
                lambda_cold,
            } => {
                section.kind = CycleKindName::CouplingScaling;
                section.omega_hot = None;
                section.omega_cold = None;
                section.lambda = None;
                section.omega = Some(omega);
                section.lambda_hot = Some(lambda_hot);
                section.lambda_cold = Some(lambda_cold);
            }
        }
        section
    }
}
