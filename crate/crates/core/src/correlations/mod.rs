//! Photon statistics and photon-qubit entanglement of the thermal state.
//!
//! The dressed emission operator is built in the eigenbasis `|φ_k⟩`:
//!
//! ```text
//! X⁺ = −i Σ_{k>j} (E_k − E_j) ⟨φ_j|(a + a†)|φ_k⟩ |φ_j⟩⟨φ_k|,   X⁻ = (X⁺)†
//! ```
//!
//! and reduces to `−iω a` without coupling.

mod density;

use serde::{Deserialize, Serialize};

pub use density::{thermal_density_matrix, DensityMatrix, Partition};

use crate::cycle::{gibbs_populations, ThermalState};
use crate::linalg::{self, c64};
use crate::spectral::{diagonalize_bare, ModelParams, Spectrum};
use crate::{Error, Result};
use faer::Mat;

/// Denominators `⟨a†a⟩` or `⟨X⁻X⁺⟩` below this are treated as vacuum.
pub const VACUUM_THRESHOLD: f64 = 1e-8;
/// Default population floor for density-matrix assembly.
pub const POPULATION_FLOOR: f64 = 1e-12;

/// A ratio that is undefined when its denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: f64,
    pub denominator: f64,
}

impl Ratio {
    /// `numerator / denominator²`, or `None` below the vacuum threshold.
    pub fn value(&self) -> Option<f64> {
        (self.denominator > VACUUM_THRESHOLD).then(|| self.numerator / (self.denominator * self.denominator))
    }

    pub fn vacuum_dominated(&self) -> bool {
        self.denominator <= VACUUM_THRESHOLD
    }
}

/// `⟨a†²a²⟩ / ⟨a†a⟩²`.
pub fn g2_conventional(rho: &DensityMatrix) -> Ratio {
    let basis = rho.basis();
    let mut pairs = 0.0;
    let mut photons = 0.0;
    for row in 0..basis.dim() {
        let n = basis.split(row).0 as f64;
        let w = rho.matrix().read(row, row);
        photons += n * w;
        pairs += n * (n - 1.0) * w;
    }
    Ratio {
        numerator: pairs,
        denominator: photons,
    }
}

/// Real matrix `Y` with `X⁺ = −i V Y Vᵀ`, in the eigenbasis of `spec`.
pub fn x_plus_eigenbasis(spec: &Spectrum) -> Mat<f64> {
    let basis = spec.basis();
    let v = spec.eigenvectors();
    let x = linalg::matmul(v.transpose(), basis.apply_quadrature(v).as_ref());
    let e = spec.energies();
    Mat::from_fn(e.len(), e.len(), |j, k| if k > j { (e[k] - e[j]) * x.read(j, k) } else { 0.0 })
}

/// `X⁺` as a complex matrix on the bare product basis.
pub fn build_x_plus(spec: &Spectrum) -> Mat<c64> {
    let y = x_plus_eigenbasis(spec);
    let v = spec.eigenvectors();
    let vy = linalg::matmul(v, y.as_ref());
    let real = linalg::matmul(vy.as_ref(), v.transpose());
    Mat::from_fn(real.nrows(), real.ncols(), |i, j| c64::new(0.0, -real.read(i, j)))
}

/// `⟨(X⁻)²(X⁺)²⟩ / ⟨X⁻X⁺⟩²` on populations diagonal in the eigenbasis.
pub fn g2_generalized(spec: &Spectrum, state: &ThermalState) -> Result<Ratio> {
    if state.len() != spec.len() {
        return Err(Error::param("populations", "length does not match the spectrum"));
    }
    let y = x_plus_eigenbasis(spec);
    let y2 = linalg::matmul(y.as_ref(), y.as_ref());
    let mut single = 0.0;
    let mut double = 0.0;
    for (k, &p) in state.populations.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let n1: f64 = (0..k).map(|j| y.read(j, k).powi(2)).sum();
        let n2: f64 = (0..k).map(|j| y2.read(j, k).powi(2)).sum();
        single += p * n1;
        double += p * n2;
    }
    Ok(Ratio {
        numerator: double,
        denominator: single,
    })
}

/// `(‖ρ^{T_A}‖₁ − 1)/2`, as the magnitude sum of negative eigenvalues of the
/// partial transpose.
pub fn negativity(rho: &DensityMatrix, partition: Partition) -> f64 {
    let pt = rho.partial_transpose(partition);
    linalg::symmetric_eigenvalues(pt.as_ref())
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(|l| -l)
        .sum()
}

/// Trace norm of the partial transpose from its singular values.
pub fn partial_transpose_trace_norm(rho: &DensityMatrix, partition: Partition) -> f64 {
    let pt = rho.partial_transpose(partition);
    linalg::singular_values(pt.as_ref()).iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CorrelationFlags {
    /// `⟨a†a⟩` below the vacuum threshold.
    pub vacuum_dominated: bool,
    /// `⟨X⁻X⁺⟩` below the vacuum threshold.
    pub emission_vacuum_dominated: bool,
    /// `G² < 1`.
    pub antibunched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub g2_conventional: Option<f64>,
    pub g2_generalized: Option<f64>,
    pub negativity: f64,
    pub mean_photon: f64,
    pub fock_cutoff: usize,
    pub flags: CorrelationFlags,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOptions {
    pub population_floor: f64,
    pub partition: Partition,
    /// Lower the Fock cutoff to the smallest value, in steps of 10 from 10,
    /// where `⟨a†a⟩` changes by less than `1e-6`; never above `p.n_tr`.
    pub auto_cutoff: bool,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            population_floor: POPULATION_FLOOR,
            partition: Partition::Field,
            auto_cutoff: false,
        }
    }
}

/// Bare spectrum, Gibbs state and density matrix at `temperature`.
pub fn thermal_inputs(p: &ModelParams, temperature: f64, floor: f64) -> Result<(Spectrum, ThermalState, DensityMatrix)> {
    let spec = diagonalize_bare(p)?;
    let state = gibbs_populations(spec.energies(), temperature)?;
    let rho = thermal_density_matrix(&spec, &state, floor)?;
    Ok((spec, state, rho))
}

/// Smallest Fock cutoff, from 10 in steps of 10 and at most `p.n_tr`, at
/// which `⟨a†a⟩` moves by less than `1e-6` on the next step.
pub fn auto_fock_cutoff(p: &ModelParams, temperature: f64, floor: f64) -> Result<usize> {
    let mean = |cutoff: usize| -> Result<f64> {
        let (_, _, rho) = thermal_inputs(&p.with_n_tr(cutoff), temperature, floor)?;
        Ok(rho.mean_photon())
    };
    let mut cutoff = 10.min(p.n_tr);
    let mut current = mean(cutoff)?;
    while cutoff < p.n_tr {
        let next_cutoff = (cutoff + 10).min(p.n_tr);
        let next = mean(next_cutoff)?;
        if (next - current).abs() < 1e-6 {
            return Ok(cutoff);
        }
        cutoff = next_cutoff;
        current = next;
    }
    Ok(p.n_tr)
}

pub fn correlation_report(p: &ModelParams, temperature: f64, opts: &CorrelationOptions) -> Result<CorrelationReport> {
    let cutoff = if opts.auto_cutoff {
        auto_fock_cutoff(p, temperature, opts.population_floor)?
    } else {
        p.n_tr
    };
    let (spec, state, rho) = thermal_inputs(&p.with_n_tr(cutoff), temperature, opts.population_floor)?;
    let conventional = g2_conventional(&rho);
    let generalized = g2_generalized(&spec, &state.floored(opts.population_floor))?;
    let g2_generalized = generalized.value();
    Ok(CorrelationReport {
        g2_conventional: conventional.value(),
        g2_generalized,
        negativity: negativity(&rho, opts.partition),
        mean_photon: rho.mean_photon(),
        fock_cutoff: cutoff,
        flags: CorrelationFlags {
            vacuum_dominated: conventional.vacuum_dominated(),
            emission_vacuum_dominated: generalized.vacuum_dominated(),
            antibunched: g2_generalized.is_some_and(|g| g < 1.0),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ProductBasis;

    fn report(n: usize, lambda: f64, t: f64, n_tr: usize) -> CorrelationReport {
        correlation_report(&ModelParams::resonant(1.0, lambda, n, n_tr), t, &CorrelationOptions::default()).unwrap()
    }

    #[test]
    fn thermal_light_bunches() {
        // Geometric photon distribution: ⟨n(n−1)⟩ = 2 n̄².
        let r = report(2, 0.0, 0.5, 60);
        let nbar = 1.0 / (2.0f64.exp() - 1.0);
        assert!((r.mean_photon - nbar).abs() < 1e-10);
        assert!((r.g2_conventional.unwrap() - 2.0).abs() < 1e-6);
        assert!((r.g2_generalized.unwrap() - 2.0).abs() < 1e-6);
        assert!(r.negativity.abs() < 1e-12);
    }

    #[test]
    fn synthetic_field_states() {
        let basis = ProductBasis::new(1, 12);
        // |1⟩ ⊗ |↓⟩
        let row = basis.index(1, 0);
        let fock = Mat::from_fn(basis.dim(), basis.dim(), |i, j| if i == row && j == row { 1.0 } else { 0.0 });
        let rho = DensityMatrix::new(basis, fock).unwrap();
        assert_eq!(g2_conventional(&rho).value(), Some(0.0));
        // Coherent amplitude 0.3, well inside the cutoff.
        let alpha: f64 = 0.3;
        let amp: Vec<f64> = (0..=12)
            .map(|n| (-alpha * alpha / 2.0).exp() * alpha.powi(n) / (1..=n).map(|k| (k as f64).sqrt()).product::<f64>())
            .collect();
        let coherent = Mat::from_fn(basis.dim(), basis.dim(), |i, j| {
            let ((ni, si), (nj, sj)) = (basis.split(i), basis.split(j));
            if si == 0 && sj == 0 { amp[ni] * amp[nj] } else { 0.0 }
        });
        let rho = DensityMatrix::new(basis, coherent).unwrap();
        assert!((g2_conventional(&rho).value().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn x_plus_reduces_to_scaled_annihilator() {
        let p = ModelParams::new(1.0, 0.7, 0.0, 2, 6);
        let spec = diagonalize_bare(&p).unwrap();
        let x = build_x_plus(&spec);
        let basis = p.basis();
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let ((ni, si), (nj, sj)) = (basis.split(i), basis.split(j));
                let expected = if si == sj && nj == ni + 1 { -(nj as f64).sqrt() } else { 0.0 };
                let v = x.read(i, j);
                assert!(v.re.abs() < 1e-12 && (v.im - expected).abs() < 1e-12, "{i},{j}");
            }
        }
    }

    #[test]
    fn x_plus_is_strictly_upper_in_eigenbasis() {
        let spec = diagonalize_bare(&ModelParams::resonant(1.0, 1.0, 2, 20)).unwrap();
        let y = x_plus_eigenbasis(&spec);
        for j in 0..y.nrows() {
            for k in 0..=j {
                assert_eq!(y.read(j, k), 0.0);
            }
        }
    }

    #[test]
    fn emission_correlator_two_ways() {
        let p = ModelParams::resonant(1.0, 1.0, 2, 25);
        let spec = diagonalize_bare(&p).unwrap();
        let state = gibbs_populations(spec.energies(), 0.7).unwrap();
        // Operator product in the bare basis.
        let x = build_x_plus(&spec);
        let xm = Mat::from_fn(x.nrows(), x.ncols(), |i, j| x.read(j, i).conj());
        let xmxp = linalg::matmul(xm.as_ref(), x.as_ref());
        let rho = thermal_density_matrix(&spec, &state, 0.0).unwrap();
        let mut product = 0.0;
        for i in 0..x.nrows() {
            for j in 0..x.nrows() {
                product += rho.matrix().read(i, j) * xmxp.read(j, i).re;
            }
        }
        // Spectral sum Σ_{k>j} |X_jk|² Δ²_kj P_k.
        let y = x_plus_eigenbasis(&spec);
        let mut spectral = 0.0;
        for k in 0..y.ncols() {
            for j in 0..k {
                spectral += y.read(j, k).powi(2) * state.populations[k];
            }
        }
        assert!((product - spectral).abs() < 1e-10, "{product} vs {spectral}");
        let ratio = g2_generalized(&spec, &state).unwrap();
        assert!((ratio.denominator - spectral).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_flagged() {
        let r = report(2, 0.05, 0.0, 20);
        assert!(r.flags.emission_vacuum_dominated);
        assert!(r.g2_generalized.is_none());
    }

    #[test]
    fn entangled_at_strong_coupling() {
        let p = ModelParams::resonant(1.0, 1.0, 2, 30);
        let (_, _, rho) = thermal_inputs(&p, 0.1, POPULATION_FLOOR).unwrap();
        let field = negativity(&rho, Partition::Field);
        let qubits = negativity(&rho, Partition::Qubits);
        assert!(field > 1e-3);
        assert!((field - qubits).abs() < 1e-10);
        let norm = partial_transpose_trace_norm(&rho, Partition::Field);
        assert!(((norm - 1.0) / 2.0 - field).abs() < 1e-8);
    }

    #[test]
    fn auto_cutoff_is_converged() {
        let p = ModelParams::resonant(1.0, 0.3, 2, 60);
        let cutoff = auto_fock_cutoff(&p, 0.5, POPULATION_FLOOR).unwrap();
        assert!(cutoff < 60);
        let (_, _, a) = thermal_inputs(&p.with_n_tr(cutoff), 0.5, POPULATION_FLOOR).unwrap();
        let (_, _, b) = thermal_inputs(&p, 0.5, POPULATION_FLOOR).unwrap();
        assert!((a.mean_photon() - b.mean_photon()).abs() < 1e-6);
    }
}
