use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::cycle::ThermalState;
use crate::spectral::{ProductBasis, Spectrum};
use crate::{linalg, Error, Result};

/// Subsystem whose indices are transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    #[default]
    Field,
    Qubits,
}

/// Real density matrix on the bare product basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: ProductBasis,
    matrix: Mat<f64>,
}

const TOLERANCE: f64 = 1e-10;

impl DensityMatrix {
    /// Checks symmetry, unit trace and positivity to `1e-10`.
    pub fn new(basis: ProductBasis, matrix: Mat<f64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::param("rho", format!("expected {d}x{d}, got {}x{}", matrix.nrows(), matrix.ncols())));
        }
        let asym = linalg::max_abs_diff(matrix.as_ref(), matrix.transpose());
        if asym > TOLERANCE {
            return Err(Error::param("rho", format!("not symmetric: {asym:.3e}")));
        }
        let trace: f64 = (0..d).map(|i| matrix.read(i, i)).sum();
        if (trace - 1.0).abs() > TOLERANCE {
            return Err(Error::param("rho", format!("trace {trace} is not one")));
        }
        let min_eigenvalue = linalg::symmetric_eigenvalues(matrix.as_ref())[0];
        if min_eigenvalue < -TOLERANCE {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix { basis, matrix })
    }

    pub fn basis(&self) -> ProductBasis {
        self.basis
    }

    pub fn matrix(&self) -> faer::MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    pub fn mean_photon(&self) -> f64 {
        (0..self.basis.dim())
            .map(|row| self.basis.split(row).0 as f64 * self.matrix.read(row, row))
            .sum()
    }

    /// Transpose the field (or spin) indices:
    /// `ρ^{T_F}[(n,s),(n',s')] = ρ[(n',s),(n,s')]`.
    pub fn partial_transpose(&self, partition: Partition) -> Mat<f64> {
        let b = self.basis;
        Mat::from_fn(b.dim(), b.dim(), |i, j| {
            let ((n, s), (np, sp)) = (b.split(i), b.split(j));
            match partition {
                Partition::Field => self.matrix.read(b.index(np, s), b.index(n, sp)),
                Partition::Qubits => self.matrix.read(b.index(n, sp), b.index(np, s)),
            }
        })
    }
}

/// `ρ = Σ_n P_n |φ_n⟩⟨φ_n|` over levels with `P_n ≥ floor`, renormalized.
pub fn thermal_density_matrix(spec: &Spectrum, state: &ThermalState, floor: f64) -> Result<DensityMatrix> {
    if state.len() != spec.len() {
        return Err(Error::param("populations", "length does not match the spectrum"));
    }
    let kept: Vec<usize> = (0..state.len()).filter(|&k| state.populations[k] >= floor && state.populations[k] > 0.0).collect();
    let total: f64 = kept.iter().map(|&k| state.populations[k]).sum();
    let v = spec.eigenvectors();
    let weighted = Mat::from_fn(v.nrows(), kept.len(), |i, c| {
        let k = kept[c];
        v.read(i, k) * (state.populations[k] / total).sqrt()
    });
    let rho = linalg::matmul(weighted.as_ref(), weighted.transpose());
    // Exact symmetry; the product is symmetric only up to rounding.
    let rho = Mat::from_fn(rho.nrows(), rho.ncols(), |i, j| 0.5 * (rho.read(i, j) + rho.read(j, i)));
    DensityMatrix::new(spec.basis(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::negativity;
    use crate::cycle::gibbs_populations;
    use crate::spectral::{build_hamiltonian_bare, diagonalize_bare, ModelParams};
    use proptest::prelude::*;

    #[test]
    fn matches_matrix_exponential() {
        let p = ModelParams::resonant(1.0, 0.5, 2, 30);
        let spec = diagonalize_bare(&p).unwrap();
        let state = gibbs_populations(spec.energies(), 0.5).unwrap();
        let rho = thermal_density_matrix(&spec, &state, 0.0).unwrap();
        let h = build_hamiltonian_bare(&p).unwrap();
        let d = h.nrows();
        let e0 = spec.ground_energy();
        let shifted = nalgebra::DMatrix::from_fn(d, d, |i, j| -(h.read(i, j) - if i == j { e0 } else { 0.0 }) / 0.5);
        let boltzmann = shifted.exp();
        let z = boltzmann.trace();
        for i in 0..d {
            for j in 0..d {
                assert!((rho.matrix().read(i, j) - boltzmann[(i, j)] / z).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn ground_projector_at_zero_temperature() {
        let p = ModelParams::resonant(1.0, 0.3, 2, 20);
        let spec = diagonalize_bare(&p).unwrap();
        let state = gibbs_populations(spec.energies(), 0.0).unwrap();
        let rho = thermal_density_matrix(&spec, &state, 1e-12).unwrap();
        let squared = linalg::matmul(rho.matrix(), rho.matrix());
        assert!(linalg::max_abs_diff(squared.as_ref(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn decoupled_state_factorizes() {
        let p = ModelParams::new(1.0, 0.6, 0.0, 3, 25);
        let spec = diagonalize_bare(&p).unwrap();
        let state = gibbs_populations(spec.energies(), 0.8).unwrap();
        let rho = thermal_density_matrix(&spec, &state, 0.0).unwrap();
        let basis = p.basis();
        let field: Vec<f64> = (0..basis.fock_dim()).map(|n| (-(n as f64) / 0.8).exp()).collect();
        let spin: Vec<f64> = (0..basis.spin_dim()).map(|s| (-0.6 * basis.m(s) / 0.8).exp()).collect();
        let z: f64 = field.iter().sum::<f64>() * spin.iter().sum::<f64>();
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let (n, s) = basis.split(i);
                let expected = if i == j { field[n] * spin[s] / z } else { 0.0 };
                assert!((rho.matrix().read(i, j) - expected).abs() < 1e-12);
            }
        }
        assert!(negativity(&rho, Partition::Field).abs() < 1e-12);
    }

    #[test]
    fn bell_state_negativity() {
        let basis = ProductBasis::new(1, 1);
        let (a, b) = (basis.index(0, 0), basis.index(1, 1));
        let m = Mat::from_fn(4, 4, |i, j| if (i == a || i == b) && (j == a || j == b) { 0.5 } else { 0.0 });
        let rho = DensityMatrix::new(basis, m).unwrap();
        assert!((negativity(&rho, Partition::Field) - 0.5).abs() < 1e-14);
        assert!((negativity(&rho, Partition::Qubits) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let basis = ProductBasis::new(1, 0);
        let bad_trace = Mat::from_fn(2, 2, |i, j| if i == j { 0.7 } else { 0.0 });
        assert!(DensityMatrix::new(basis, bad_trace).is_err());
        let negative = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => 1.5,
            (1, 1) => -0.5,
            _ => 0.0,
        });
        assert!(matches!(DensityMatrix::new(basis, negative), Err(Error::NotPositive { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn partial_transpose_properties(lambda in 0.0f64..1.5, t in 0.05f64..3.0, n in 1usize..4) {
            let p = ModelParams::resonant(1.0, lambda, n, 12);
            let spec = diagonalize_bare(&p).unwrap();
            let state = gibbs_populations(spec.energies(), t).unwrap();
            let rho = thermal_density_matrix(&spec, &state, 1e-12).unwrap();
            for partition in [Partition::Field, Partition::Qubits] {
                let once = DensityMatrix { basis: rho.basis(), matrix: rho.partial_transpose(partition) };
                let twice = once.partial_transpose(partition);
                prop_assert_eq!(linalg::max_abs_diff(twice.as_ref(), rho.matrix()), 0.0);
                let norm: f64 = linalg::singular_values(once.matrix()).iter().sum();
                prop_assert!(norm >= 1.0 - 1e-10);
                let neg = negativity(&rho, partition);
                prop_assert!(neg >= 0.0);
                prop_assert!(((norm - 1.0) / 2.0 - neg).abs() < 1e-9);
            }
            let field = negativity(&rho, Partition::Field);
            let qubits = negativity(&rho, Partition::Qubits);
            prop_assert!((field - qubits).abs() < 1e-10);
            let trace: f64 = (0..rho.basis().dim()).map(|i| rho.matrix().read(i, i)).sum();
            prop_assert!((trace - 1.0).abs() < 1e-10);
        }
    }
}
