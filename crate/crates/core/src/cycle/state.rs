use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gap below which eigenvalues count as one degenerate ground manifold at
/// zero temperature.
pub const GROUND_DEGENERACY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateFlags {
    /// Zero temperature with more than one level in the ground manifold.
    pub degenerate_ground: bool,
    /// The rate graph could not be solved and Gibbs weights were used.
    pub gibbs_fallback: bool,
}

/// Steady-state populations over the eigenstates of one Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub populations: Vec<f64>,
    pub temperature: f64,
    pub flags: StateFlags,
}

impl ThermalState {
    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }

    /// Drop populations below `floor` and renormalize.
    pub fn floored(&self, floor: f64) -> ThermalState {
        let mut populations: Vec<f64> = self
            .populations
            .iter()
            .map(|&p| if p < floor { 0.0 } else { p })
            .collect();
        let total: f64 = populations.iter().sum();
        populations.iter_mut().for_each(|p| *p /= total);
        ThermalState {
            populations,
            temperature: self.temperature,
            flags: self.flags,
        }
    }
}

pub(crate) fn check_temperature(temperature: f64) -> Result<()> {
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::param("temperature", format!("must be non-negative, got {temperature}")));
    }
    Ok(())
}

/// `P_n = exp(−(E_n − E_0)/T) / Z` over ascending `energies`.
///
/// `T = ∞` gives uniform weights. `T = 0` populates the ground manifold
/// (levels within `1e-8` of `E_0`) uniformly.
pub fn gibbs_populations(energies: &[f64], temperature: f64) -> Result<ThermalState> {
    check_temperature(temperature)?;
    if energies.is_empty() {
        return Err(Error::param("energies", "empty spectrum"));
    }
    let e0 = energies[0];
    let mut flags = StateFlags::default();
    let mut populations: Vec<f64> = if temperature == 0.0 {
        let ground = energies.iter().take_while(|&&e| e - e0 < GROUND_DEGENERACY).count();
        flags.degenerate_ground = ground > 1;
        (0..energies.len()).map(|k| if k < ground { 1.0 } else { 0.0 }).collect()
    } else if temperature.is_infinite() {
        vec![1.0; energies.len()]
    } else {
        energies.iter().map(|e| (-(e - e0) / temperature).exp()).collect()
    };
    let z: f64 = populations.iter().sum();
    populations.iter_mut().for_each(|p| *p /= z);
    Ok(ThermalState {
        populations,
        temperature,
        flags,
    })
}
