//! Holstein-Primakoff limit spectra used as analytic references.

use serde::{Deserialize, Serialize};

use super::{critical_coupling, ModelParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Superradiant,
}

/// Two normal-mode energies of the bilinear large-`N` Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    pub eps_minus: f64,
    pub eps_plus: f64,
    pub phase: Phase,
    /// Set when `ε₋²` came out negative through rounding and was clamped.
    pub clamped: bool,
}

/// Deep-strong-coupling levels `E_mn` indexed `[m][n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepStrongLevels {
    pub levels: Vec<Vec<f64>>,
    /// Energy shift shared by all levels.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HpLimitSpectrum {
    NormalModes(NormalModes),
    DeepStrong(DeepStrongLevels),
}

impl HpLimitSpectrum {
    pub fn normal_modes(&self) -> Option<&NormalModes> {
        match self {
            HpLimitSpectrum::NormalModes(m) => Some(m),
            HpLimitSpectrum::DeepStrong(_) => None,
        }
    }

    pub fn deep_strong(&self) -> Option<&DeepStrongLevels> {
        match self {
            HpLimitSpectrum::DeepStrong(d) => Some(d),
            HpLimitSpectrum::NormalModes(_) => None,
        }
    }
}

fn roots(sum_sq: f64, disc: f64, phase: Phase) -> NormalModes {
    let minus_sq = sum_sq - disc;
    let clamped = minus_sq < 0.0;
    NormalModes {
        eps_minus: minus_sq.max(0.0).sqrt(),
        eps_plus: (sum_sq + disc).sqrt(),
        phase,
        clamped,
    }
}

/// `ε±² = (ω0² + Δ²)/2 ± ½ √((ω0² − Δ²)² + 16 λ² ω0 Δ)`, valid for `λ ≤ λ_c`.
pub fn hp_normal_spectrum(p: &ModelParams) -> Result<HpLimitSpectrum> {
    p.validate()?;
    let lc = critical_coupling(p.omega0, p.delta, 0.0);
    if p.lambda > lc * (1.0 + 1e-12) {
        return Err(Error::param(
            "lambda",
            format!("normal-phase modes need λ ≤ λ_c = {lc}, got {}", p.lambda),
        ));
    }
    let (w2, d2) = (p.omega0 * p.omega0, p.delta * p.delta);
    let sum_sq = 0.5 * (w2 + d2);
    let disc = 0.5 * ((w2 - d2).powi(2) + 16.0 * p.lambda.powi(2) * p.omega0 * p.delta).sqrt();
    Ok(HpLimitSpectrum::NormalModes(roots(sum_sq, disc, Phase::Normal)))
}

/// Normal modes about the displaced (superradiant) mean field, `λ > λ_c`:
///
/// ```text
/// 2 ε±² = ω0² + Δ² λ⁴/λ_c⁴ ± √((Δ² λ⁴/λ_c⁴ − ω0²)² + 4 ω0² Δ²)
/// ```
///
/// with `λ_c = √(ω0Δ)/2`. At resonance this coincides with the form that
/// rescales `ω0` instead of `Δ`; off resonance only this one reproduces the
/// finite-`N` gaps.
pub fn hp_superradiant_spectrum(p: &ModelParams) -> Result<HpLimitSpectrum> {
    p.validate()?;
    let lc = critical_coupling(p.omega0, p.delta, 0.0);
    if p.lambda <= lc {
        return Err(Error::param(
            "lambda",
            format!("superradiant modes need λ > λ_c = {lc}, got {}", p.lambda),
        ));
    }
    let ratio = (p.lambda / lc).powi(4);
    let (w2, d2) = (p.omega0 * p.omega0, p.delta * p.delta);
    let atom = d2 * ratio;
    let sum_sq = 0.5 * (w2 + atom);
    let disc = 0.5 * ((atom - w2).powi(2) + 4.0 * w2 * d2).sqrt();
    Ok(HpLimitSpectrum::NormalModes(roots(sum_sq, disc, Phase::Superradiant)))
}

/// Leading deep-strong levels for `λ ≫ ω0`, spins polarized along `x`:
///
/// ```text
/// E_mn = m · 4λ²/ω0 + n · ω0 − N λ²/ω0
/// ```
///
/// `m` counts collective spin flips away from `|J_x| = N/2`, `n` counts
/// displaced photons. The coupling normalization is the `2λ/√N` one used by
/// the Hamiltonian builders.
pub fn hp_deep_strong_levels(p: &ModelParams, m_max: usize, n_max: usize) -> Result<HpLimitSpectrum> {
    p.validate()?;
    let spin_gap = 4.0 * p.lambda * p.lambda / p.omega0;
    let offset = -(p.n_qubits as f64) * p.lambda * p.lambda / p.omega0;
    let levels = (0..=m_max)
        .map(|m| {
            (0..=n_max)
                .map(|n| m as f64 * spin_gap + n as f64 * p.omega0 + offset)
                .collect()
        })
        .collect();
    Ok(HpLimitSpectrum::DeepStrong(DeepStrongLevels { levels, offset }))
}
