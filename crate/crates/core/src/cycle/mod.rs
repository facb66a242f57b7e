//! Four-stroke quantum Otto cycle on the Dicke working substance.
//!
//! The substance thermalizes with the hot bath at Hamiltonian `H_h`, is
//! driven adiabatically to `H_c` (populations carried by level index),
//! thermalizes with the cold bath, and is driven back. With `P^h`, `P^c` the
//! steady-state populations at `T_h`, `T_c`:
//!
//! ```text
//! Q_h = Σ E^h_n (P^h_n − P^c_n)
//! Q_c = Σ E^c_n (P^c_n − P^h_n)
//! W   = Q_h + Q_c
//! ```
//!
//! Positive heat is absorbed by the substance; positive work is done by it.

mod rates;
mod state;

use serde::{Deserialize, Serialize};

pub use rates::{rate_null_space, steady_state, steady_state_from_rates, transition_rates, BathParams, RateMatrix};
pub use state::{gibbs_populations, StateFlags, ThermalState, GROUND_DEGENERACY};

use crate::spectral::{self, Method, ModelParams, DEFAULT_N_TR};
use crate::{Error, Result};

/// Populations below this are dropped on both sides before the heat sums.
pub const POPULATION_FLOOR: f64 = 1e-16;
/// Heats and work all below this in magnitude make a cycle `Degenerate`.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Engine,
    Refrigerator,
    Heater,
    Accelerator,
    Degenerate,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::Heater => "heater",
            Regime::Accelerator => "accelerator",
            Regime::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the coupling is set on each side of a frequency-scaling cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    /// The same `λ` on both sides.
    #[default]
    Absolute,
    /// `λ/ω` held fixed: `λ` is the cold-side value and the hot side uses
    /// `λ ω_h/ω_c`. The hot Hamiltonian is then `ω_h/ω_c` times the cold one.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Resonant `ω0 = Δ = ω` switched between `ω_h` and `ω_c`.
    FrequencyScaling {
        omega_hot: f64,
        omega_cold: f64,
        lambda: f64,
        #[serde(default)]
        lambda_mode: LambdaMode,
    },
    /// Fixed resonant frequency, coupling switched between `λ_h` and `λ_c`.
    CouplingScaling {
        omega: f64,
        lambda_hot: f64,
        lambda_cold: f64,
    },
}

/// Where level populations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationSource {
    #[default]
    Gibbs,
    RateEquation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleProtocol {
    pub kind: ProtocolKind,
    pub n_qubits: usize,
    pub n_tr: usize,
    pub t_hot: f64,
    pub t_cold: f64,
    /// Solver used for the endpoint spectra.
    pub method: Method,
    pub populations: PopulationSource,
    pub alpha: f64,
    pub omega_co: f64,
}

impl CycleProtocol {
    /// Frequency-scaling cycle with the defaults used throughout: ECS
    /// energies, `N_tr = 50`, Gibbs populations, absolute `λ`.
    pub fn frequency_scaling(omega_hot: f64, omega_cold: f64, lambda: f64, n_qubits: usize, t_hot: f64, t_cold: f64) -> Self {
        CycleProtocol {
            kind: ProtocolKind::FrequencyScaling {
                omega_hot,
                omega_cold,
                lambda,
                lambda_mode: LambdaMode::Absolute,
            },
            n_qubits,
            n_tr: DEFAULT_N_TR,
            t_hot,
            t_cold,
            method: Method::Ecs,
            populations: PopulationSource::Gibbs,
            alpha: BathParams::DEFAULT_ALPHA,
            omega_co: BathParams::DEFAULT_OMEGA_CO,
        }
    }

    pub fn coupling_scaling(omega: f64, lambda_hot: f64, lambda_cold: f64, n_qubits: usize, t_hot: f64, t_cold: f64) -> Self {
        CycleProtocol {
            kind: ProtocolKind::CouplingScaling {
                omega,
                lambda_hot,
                lambda_cold,
            },
            ..Self::frequency_scaling(1.0, 1.0, 0.0, n_qubits, t_hot, t_cold)
        }
    }

    pub fn with_lambda_mode(mut self, mode: LambdaMode) -> Self {
        if let ProtocolKind::FrequencyScaling { ref mut lambda_mode, .. } = self.kind {
            *lambda_mode = mode;
        }
        self
    }

    pub fn with_n_tr(self, n_tr: usize) -> Self {
        CycleProtocol { n_tr, ..self }
    }

    pub fn with_method(self, method: Method) -> Self {
        CycleProtocol { method, ..self }
    }

    pub fn with_populations(self, populations: PopulationSource) -> Self {
        CycleProtocol { populations, ..self }
    }

    pub fn hot_params(&self) -> ModelParams {
        match self.kind {
            ProtocolKind::FrequencyScaling {
                omega_hot,
                omega_cold,
                lambda,
                lambda_mode,
            } => {
                let lambda = match lambda_mode {
                    LambdaMode::Absolute => lambda,
                    LambdaMode::Ratio => lambda * omega_hot / omega_cold,
                };
                ModelParams::resonant(omega_hot, lambda, self.n_qubits, self.n_tr)
            }
            ProtocolKind::CouplingScaling { omega, lambda_hot, .. } => {
                ModelParams::resonant(omega, lambda_hot, self.n_qubits, self.n_tr)
            }
        }
    }

    pub fn cold_params(&self) -> ModelParams {
        match self.kind {
            ProtocolKind::FrequencyScaling { omega_cold, lambda, .. } => {
                ModelParams::resonant(omega_cold, lambda, self.n_qubits, self.n_tr)
            }
            ProtocolKind::CouplingScaling { omega, lambda_cold, .. } => {
                ModelParams::resonant(omega, lambda_cold, self.n_qubits, self.n_tr)
            }
        }
    }

    pub fn hot_bath(&self) -> BathParams {
        BathParams {
            alpha: self.alpha,
            omega_co: self.omega_co,
            temperature: self.t_hot,
        }
    }

    pub fn cold_bath(&self) -> BathParams {
        BathParams {
            temperature: self.t_cold,
            ..self.hot_bath()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_temperatures(self.t_hot, self.t_cold)?;
        self.hot_params().validate()?;
        self.cold_params().validate()?;
        self.hot_bath().validate()
    }
}

fn check_temperatures(t_hot: f64, t_cold: f64) -> Result<()> {
    if !(t_cold.is_finite() && t_cold > 0.0) {
        return Err(Error::param("t_cold", format!("must be positive and finite, got {t_cold}")));
    }
    if !(t_hot.is_finite() && t_hot >= t_cold) {
        return Err(Error::param("t_hot", format!("must be finite and at least t_cold = {t_cold}, got {t_hot}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleResult {
    pub q_hot: f64,
    pub q_cold: f64,
    pub work: f64,
    pub regime: Regime,
    /// `W/Q_h`, engines only.
    pub eta: Option<f64>,
    /// `Q_c/|W|`, refrigerators only.
    pub cop: Option<f64>,
    pub carnot_eta: f64,
    pub carnot_cop: f64,
}

/// Assign the machine regime from the signs of `Q_h`, `Q_c` and `W`.
///
/// | regime       | Q_h | Q_c | W   |
/// |--------------|-----|-----|-----|
/// | Engine       | > 0 | < 0 | > 0 |
/// | Refrigerator | < 0 | > 0 | < 0 |
/// | Heater       | ≤ 0 | ≤ 0 | < 0 |
/// | Accelerator  | > 0 | < 0 | ≤ 0 |
///
/// Any other combination with non-negligible values would move heat from
/// cold to hot without work, or turn heat fully into work, and is rejected.
pub fn classify(q_hot: f64, q_cold: f64, work: f64) -> Result<Regime> {
    if q_hot.abs() < DEGENERACY_THRESHOLD && q_cold.abs() < DEGENERACY_THRESHOLD && work.abs() < DEGENERACY_THRESHOLD {
        return Ok(Regime::Degenerate);
    }
    let regime = if q_hot > 0.0 && q_cold < 0.0 {
        if work > 0.0 {
            Regime::Engine
        } else {
            Regime::Accelerator
        }
    } else if q_hot < 0.0 && q_cold > 0.0 && work < 0.0 {
        Regime::Refrigerator
    } else if q_hot <= 0.0 && q_cold <= 0.0 {
        Regime::Heater
    } else {
        return Err(Error::ClausiusViolation { q_hot, q_cold, work });
    };
    Ok(regime)
}

/// Otto cycle from endpoint energies (ascending, equal length) and
/// populations, paired by level index.
pub fn cycle_from_populations(
    hot_energies: &[f64],
    cold_energies: &[f64],
    hot: &ThermalState,
    cold: &ThermalState,
) -> Result<CycleResult> {
    let d = hot_energies.len();
    if cold_energies.len() != d || hot.len() != d || cold.len() != d {
        return Err(Error::param("spectrum", "hot and cold sides must have the same number of levels"));
    }
    let hot = hot.floored(POPULATION_FLOOR);
    let cold = cold.floored(POPULATION_FLOOR);
    let (eh0, ec0) = (hot_energies[0], cold_energies[0]);
    let mut q_hot = 0.0;
    let mut q_cold = 0.0;
    for n in 0..d {
        let dp = hot.populations[n] - cold.populations[n];
        q_hot += (hot_energies[n] - eh0) * dp;
        q_cold -= (cold_energies[n] - ec0) * dp;
    }
    let work = q_hot + q_cold;
    let regime = classify(q_hot, q_cold, work)?;
    let (t_hot, t_cold) = (hot.temperature, cold.temperature);
    Ok(CycleResult {
        q_hot,
        q_cold,
        work,
        regime,
        eta: (regime == Regime::Engine).then(|| work / q_hot),
        cop: (regime == Regime::Refrigerator).then(|| q_cold / work.abs()),
        carnot_eta: 1.0 - t_cold / t_hot,
        carnot_cop: t_cold / (t_hot - t_cold),
    })
}

/// Otto cycle with Gibbs populations on the given endpoint energies.
pub fn cycle_from_energies(hot_energies: &[f64], cold_energies: &[f64], t_hot: f64, t_cold: f64) -> Result<CycleResult> {
    check_temperatures(t_hot, t_cold)?;
    let hot = gibbs_populations(hot_energies, t_hot)?;
    let cold = gibbs_populations(cold_energies, t_cold)?;
    cycle_from_populations(hot_energies, cold_energies, &hot, &cold)
}

pub fn run_cycle(proto: &CycleProtocol) -> Result<CycleResult> {
    proto.validate()?;
    let (hp, cp) = (proto.hot_params(), proto.cold_params());
    match proto.populations {
        PopulationSource::Gibbs => {
            let hot = spectral::energies(&hp, proto.method)?;
            let cold = spectral::energies(&cp, proto.method)?;
            cycle_from_energies(&hot, &cold, proto.t_hot, proto.t_cold)
        }
        PopulationSource::RateEquation => {
            let hot = spectral::diagonalize(&hp, proto.method)?;
            let cold = spectral::diagonalize(&cp, proto.method)?;
            let p_hot = steady_state_from_rates(&hot, &proto.hot_bath())?;
            let p_cold = steady_state_from_rates(&cold, &proto.cold_bath())?;
            cycle_from_populations(hot.energies(), cold.energies(), &p_hot, &p_cold)
        }
    }
}

/// Hot temperature above which a harmonic working substance yields
/// positive work, `(ω_h/ω_c) T_c`.
pub fn pwc_threshold(omega_h: f64, omega_c: f64, t_cold: f64) -> f64 {
    omega_h / omega_c * t_cold
}

/// Engine efficiency of the uncoupled substance, `1 − ω_c/ω_h`.
pub fn uncoupled_efficiency(omega_h: f64, omega_c: f64) -> f64 {
    1.0 - omega_c / omega_h
}

/// Refrigerator COP of the uncoupled substance, `ω_c/(ω_h − ω_c)`.
pub fn uncoupled_cop(omega_h: f64, omega_c: f64) -> f64 {
    omega_c / (omega_h - omega_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(lambda: f64, n: usize, t_hot: f64, t_cold: f64) -> CycleProtocol {
        CycleProtocol::frequency_scaling(2.0, 1.0, lambda, n, t_hot, t_cold).with_n_tr(30)
    }

    #[test]
    fn pwc_values() {
        assert!((pwc_threshold(2.0, 1.0, 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(pwc_threshold(1.3, 1.3, 0.7), 0.7);
        assert_eq!(pwc_threshold(2.0, 1.0, 2.0), 4.0);
    }

    #[test]
    fn identical_strokes_are_degenerate() {
        let proto = CycleProtocol::frequency_scaling(1.3, 1.3, 0.7, 4, 0.3, 0.3).with_n_tr(30);
        let r = run_cycle(&proto).unwrap();
        assert_eq!(r.regime, Regime::Degenerate);
        assert_eq!((r.q_hot, r.q_cold, r.work), (0.0, 0.0, 0.0));
        // Different temperatures only conduct heat: no work, hot to cold.
        let proto = CycleProtocol::frequency_scaling(1.3, 1.3, 0.7, 4, 0.9, 0.3).with_n_tr(30);
        let r = run_cycle(&proto).unwrap();
        assert_eq!(r.work, 0.0);
        assert!(r.q_hot > 0.0);
        assert_eq!(r.regime, Regime::Accelerator);
        let proto = CycleProtocol::coupling_scaling(1.0, 0.4, 0.4, 2, 0.5, 0.5).with_n_tr(30);
        assert_eq!(run_cycle(&proto).unwrap().regime, Regime::Degenerate);
    }

    #[test]
    fn equal_temperatures_with_distinct_strokes_refrigerate() {
        // P_h(T) = P_c(T/2) for the uncoupled substance, so T_h = T_c sits
        // below the positive-work threshold.
        let r = run_cycle(&point(0.0, 2, 0.3, 0.3)).unwrap();
        assert_eq!(r.regime, Regime::Refrigerator);
        assert!((r.cop.unwrap() - 1.0).abs() < 1e-10);
        assert!(r.carnot_cop.is_infinite());
    }

    #[test]
    fn uncoupled_engine_and_refrigerator() {
        for n in [1, 2, 8] {
            let r = run_cycle(&point(0.0, n, 0.5, 0.1)).unwrap();
            assert_eq!(r.regime, Regime::Engine, "N={n}");
            assert!((r.eta.unwrap() - 0.5).abs() < 1e-10);
            let r = run_cycle(&point(0.0, n, 0.15, 0.1)).unwrap();
            assert_eq!(r.regime, Regime::Refrigerator, "N={n}");
            assert!((r.cop.unwrap() - 1.0).abs() < 1e-10);
        }
        assert_eq!(uncoupled_efficiency(2.0, 1.0), 0.5);
        assert_eq!(uncoupled_cop(2.0, 1.0), 1.0);
    }

    #[test]
    fn weak_coupling_limit() {
        let eng = run_cycle(&point(1e-6, 2, 0.5, 0.1)).unwrap();
        assert!((eng.eta.unwrap() - 0.5).abs() < 1e-6);
        let fridge = run_cycle(&point(1e-6, 2, 0.15, 0.1)).unwrap();
        assert!((fridge.cop.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn work_matches_energy_difference_form() {
        let proto = point(0.8, 4, 0.6, 0.1);
        let r = run_cycle(&proto).unwrap();
        let eh = spectral::energies(&proto.hot_params(), proto.method).unwrap();
        let ec = spectral::energies(&proto.cold_params(), proto.method).unwrap();
        let ph = gibbs_populations(&eh, 0.6).unwrap().floored(POPULATION_FLOOR);
        let pc = gibbs_populations(&ec, 0.1).unwrap().floored(POPULATION_FLOOR);
        let direct: f64 = (0..eh.len())
            .map(|n| (eh[n] - ec[n]) * (ph.populations[n] - pc.populations[n]))
            .sum();
        assert!((r.work - direct).abs() < 1e-12);
    }

    #[test]
    fn ratio_mode_is_a_rescaled_harmonic_cycle() {
        // With H_h = 2 H_c only engine (T_h > 2 T_c) or refrigerator occurs,
        // always at η = 1 − ω_c/ω_h.
        for lambda in [0.3, 0.6, 1.5] {
            let r = run_cycle(&point(lambda, 4, 0.5, 0.1).with_lambda_mode(LambdaMode::Ratio)).unwrap();
            assert_eq!(r.regime, Regime::Engine);
            assert!((r.eta.unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_populations_reproduce_gibbs_cycle() {
        let proto = point(0.9, 2, 0.5, 0.1).with_n_tr(25).with_method(Method::Bare);
        let gibbs = run_cycle(&proto).unwrap();
        let rates = run_cycle(&proto.with_populations(PopulationSource::RateEquation)).unwrap();
        assert_eq!(gibbs.regime, rates.regime);
        assert!((gibbs.work - rates.work).abs() < 1e-9);
    }

    #[test]
    fn coupling_scaling_runs() {
        let r = run_cycle(&CycleProtocol::coupling_scaling(1.0, 0.2, 1.0, 2, 1.0, 0.2).with_n_tr(30)).unwrap();
        assert!((r.work - (r.q_hot + r.q_cold)).abs() < 1e-12);
        assert!(r.eta.is_none_or(|e| e <= r.carnot_eta));
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify(1.0, -0.5, 0.5).unwrap(), Regime::Engine);
        assert_eq!(classify(-1.5, 0.5, -1.0).unwrap(), Regime::Refrigerator);
        assert_eq!(classify(-0.2, -0.3, -0.5).unwrap(), Regime::Heater);
        assert_eq!(classify(0.5, -0.7, -0.2).unwrap(), Regime::Accelerator);
        assert_eq!(classify(1e-14, -1e-14, 0.0).unwrap(), Regime::Degenerate);
        assert!(matches!(classify(-0.5, 1.0, 0.5), Err(Error::ClausiusViolation { .. })));
        assert!(matches!(classify(0.5, 0.5, 1.0), Err(Error::ClausiusViolation { .. })));
    }

    #[test]
    fn rejects_bad_temperatures() {
        assert!(run_cycle(&point(0.1, 1, 0.1, 0.2)).is_err());
        assert!(run_cycle(&point(0.1, 1, 0.1, 0.0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn first_law_and_carnot(
            lambda in 0.0f64..2.5,
            n in 1usize..4,
            t_cold in 0.05f64..1.0,
            ratio in 1.0f64..8.0,
        ) {
            let t_hot = t_cold * ratio;
            let r = run_cycle(&point(lambda, n, t_hot, t_cold)).unwrap();
            prop_assert_eq!(r.work, r.q_hot + r.q_cold);
            if let Some(eta) = r.eta {
                prop_assert!(eta <= r.carnot_eta + 1e-12);
            }
            if let Some(cop) = r.cop {
                prop_assert!(cop <= r.carnot_cop + 1e-9);
            }
        }
    }
}
