//! Pauli rate equation of the dressed master equation.

use serde::{Deserialize, Serialize};

use super::state::{check_temperature, gibbs_populations, StateFlags, ThermalState};
use crate::spectral::Spectrum;
use crate::{linalg, Error, Result};

/// Ohmic bath attached to both the qubits and the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathParams {
    #[serde(default = "BathParams::default_alpha")]
    pub alpha: f64,
    #[serde(default = "BathParams::default_omega_co")]
    pub omega_co: f64,
    #[serde(default)]
    pub temperature: f64,
}

impl BathParams {
    pub const DEFAULT_ALPHA: f64 = 0.01;
    pub const DEFAULT_OMEGA_CO: f64 = 10.0;

    fn default_alpha() -> f64 {
        Self::DEFAULT_ALPHA
    }

    fn default_omega_co() -> f64 {
        Self::DEFAULT_OMEGA_CO
    }

    pub fn at(temperature: f64) -> Self {
        BathParams {
            alpha: Self::DEFAULT_ALPHA,
            omega_co: Self::DEFAULT_OMEGA_CO,
            temperature,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::param("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.omega_co.is_finite() && self.omega_co > 0.0) {
            return Err(Error::param("omega_co", format!("must be positive, got {}", self.omega_co)));
        }
        check_temperature(self.temperature)
    }

    /// Ohmic spectral density `γ(Δ) = παΔ exp(−Δ/ω_co)`.
    pub fn spectral_density(&self, gap: f64) -> f64 {
        std::f64::consts::PI * self.alpha * gap * (-gap / self.omega_co).exp()
    }

    /// Bose-Einstein occupation `1/(exp(Δ/T) − 1)`.
    pub fn occupation(&self, gap: f64) -> f64 {
        if self.temperature == 0.0 {
            0.0
        } else {
            1.0 / (gap / self.temperature).exp_m1()
        }
    }
}

/// Dense matrix of transition rates between eigenstates, summed over the
/// qubit and cavity channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    dim: usize,
    rates: Vec<f64>,
}

impl RateMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rate of the jump `from → to`.
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[from * self.dim + to]
    }

    /// Total escape rate out of `from`.
    pub fn outgoing(&self, from: usize) -> f64 {
        self.rates[from * self.dim..(from + 1) * self.dim].iter().sum()
    }
}

/// Jump rates among eigenstates. For each pair `j > k` with a non-zero gap
/// `Δ = E_j − E_k`,
///
/// ```text
/// Γ = γ(Δ) (|S_q|² + |S_c|²),  S_q = ⟨j|(J₊ + J₋)|k⟩/√N,  S_c = ⟨j|(a + a†)|k⟩
/// j → k: Γ (1 + n(Δ)),   k → j: Γ n(Δ)
/// ```
pub fn transition_rates(spec: &Spectrum, bath: &BathParams) -> Result<RateMatrix> {
    bath.validate()?;
    if bath.temperature.is_infinite() {
        return Err(Error::param("temperature", "rates need a finite temperature"));
    }
    let basis = spec.basis();
    let v = spec.eigenvectors();
    let cavity = linalg::matmul(v.transpose(), basis.apply_quadrature(v).as_ref());
    let qubit = linalg::matmul(v.transpose(), basis.apply_spin_flip(v).as_ref());
    let inv_n = 1.0 / spec.n_qubits() as f64;
    let e = spec.energies();
    let dim = e.len();
    let mut rates = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..j {
            let gap = e[j] - e[k];
            if gap <= 1e-12 * e[j].abs().max(1.0) {
                continue;
            }
            let strength = qubit.read(j, k).powi(2) * inv_n + cavity.read(j, k).powi(2);
            let gamma = bath.spectral_density(gap) * strength;
            let n = bath.occupation(gap);
            rates[j * dim + k] = gamma * (1.0 + n);
            rates[k * dim + j] = gamma * n;
        }
    }
    Ok(RateMatrix { dim, rates })
}

/// Null vector of the rate equation by Grassmann-Taksar-Heyman elimination,
/// which needs no subtractions. Returns `None` when some state cannot decay
/// to any lower-indexed one after elimination.
pub fn rate_null_space(rates: &RateMatrix) -> Option<Vec<f64>> {
    let d = rates.dim();
    let mut q = rates.rates.clone();
    for i in 0..d {
        q[i * d + i] = 0.0;
    }
    let mut escape = vec![0.0; d];
    for n in (1..d).rev() {
        let s: f64 = q[n * d..n * d + n].iter().sum();
        if s.is_nan() || s <= 0.0 {
            return None;
        }
        escape[n] = s;
        for i in 0..n {
            let into = q[i * d + n];
            if into == 0.0 {
                continue;
            }
            let f = into / s;
            for j in 0..n {
                q[i * d + j] += f * q[n * d + j];
            }
        }
    }
    let mut pi = vec![0.0; d];
    pi[0] = 1.0;
    for n in 1..d {
        let inflow: f64 = (0..n).map(|i| pi[i] * q[i * d + n]).sum();
        pi[n] = inflow / escape[n];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Some(pi)
}

/// Steady state of the dressed master equation. With detailed-balance
/// rates this is the Gibbs state, which is returned directly.
pub fn steady_state(spec: &Spectrum, bath: &BathParams) -> Result<ThermalState> {
    bath.validate()?;
    gibbs_populations(spec.energies(), bath.temperature)
}

/// Steady state from the null space of the rate equation. Falls back to
/// Gibbs weights, with a flag, at `T = 0`, `T = ∞` or for a rate graph that
/// does not connect all states.
pub fn steady_state_from_rates(spec: &Spectrum, bath: &BathParams) -> Result<ThermalState> {
    bath.validate()?;
    if bath.temperature == 0.0 || bath.temperature.is_infinite() {
        return gibbs_populations(spec.energies(), bath.temperature);
    }
    let rates = transition_rates(spec, bath)?;
    match rate_null_space(&rates) {
        Some(populations) => Ok(ThermalState {
            populations,
            temperature: bath.temperature,
            flags: StateFlags::default(),
        }),
        None => {
            let mut state = gibbs_populations(spec.energies(), bath.temperature)?;
            state.flags.gibbs_fallback = true;
            Ok(state)
        }
    }
}
