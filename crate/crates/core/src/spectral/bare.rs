use faer::Mat;

use super::basis::ProductBasis;
use super::{ModelParams, Spectrum, SolverOptions, Method};
use crate::{linalg, Error, Result};

/// Dicke Hamiltonian `ω0 a†a + Δ J_z + (2λ/√N)(a† + a) J_x` in the bare
/// product basis, rejecting dimensions above the default cap.
pub fn build_hamiltonian_bare(p: &ModelParams) -> Result<Mat<f64>> {
    build_hamiltonian_bare_capped(p, SolverOptions::default().dimension_cap)
}

pub fn build_hamiltonian_bare_capped(p: &ModelParams, cap: usize) -> Result<Mat<f64>> {
    p.validate()?;
    let basis = p.basis();
    let dim = basis.dim();
    if dim > cap {
        return Err(Error::DimensionOverflow { dimension: dim, cap });
    }
    Ok(assemble(p, &basis))
}

fn assemble(p: &ModelParams, basis: &ProductBasis) -> Mat<f64> {
    let mut h = Mat::<f64>::zeros(basis.dim(), basis.dim());
    // (2λ/√N) J_x = (λ/√N)(J₊ + J₋)
    let coupling = p.lambda / (p.n_qubits as f64).sqrt();
    for n in 0..basis.fock_dim() {
        for s in 0..basis.spin_dim() {
            let row = basis.index(n, s);
            h.write(row, row, p.omega0 * n as f64 + p.delta * basis.m(s));
            if n < basis.fock_cutoff && coupling != 0.0 {
                let photon = ((n + 1) as f64).sqrt();
                if s < p.n_qubits {
                    let col = basis.index(n + 1, s + 1);
                    let v = coupling * photon * basis.raise(s);
                    h.write(row, col, v);
                    h.write(col, row, v);
                }
                if s > 0 {
                    let col = basis.index(n + 1, s - 1);
                    let v = coupling * photon * basis.raise(s - 1);
                    h.write(row, col, v);
                    h.write(col, row, v);
                }
            }
        }
    }
    h
}

/// Full eigen-decomposition in the bare basis.
pub fn diagonalize_bare(p: &ModelParams) -> Result<Spectrum> {
    diagonalize_bare_with(p, &SolverOptions::default())
}

pub fn diagonalize_bare_with(p: &ModelParams, opts: &SolverOptions) -> Result<Spectrum> {
    let h = build_hamiltonian_bare_capped(p, opts.dimension_cap)?;
    let (energies, vectors) = linalg::symmetric_eigen(h.as_ref());
    let spectrum = Spectrum::from_parts(energies, vectors, p.n_qubits, p.n_tr, p.n_tr, Method::Bare);
    if opts.residual_check {
        spectrum.check_residual(h.as_ref())?;
    }
    Ok(spectrum)
}

/// Eigenvalues only, ascending.
pub fn bare_energies(p: &ModelParams) -> Result<Vec<f64>> {
    bare_energies_with(p, &SolverOptions::default())
}

pub fn bare_energies_with(p: &ModelParams, opts: &SolverOptions) -> Result<Vec<f64>> {
    let h = build_hamiltonian_bare_capped(p, opts.dimension_cap)?;
    Ok(linalg::symmetric_eigenvalues(h.as_ref()))
}
