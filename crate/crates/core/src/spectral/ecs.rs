//! Extended coherent-state diagonalization.
//!
//! After the π/2 rotation about `J_y` the coupling is diagonal in `J_z`, so
//! for each spin slot `m` the bosonic factor is expanded in Fock states of the
//! displaced mode `A_m = a + g_m`, `g_m = 2λm/(ω0√N)`. In that basis the
//! Hamiltonian reads
//!
//! ```text
//! ⟨m,l|H|m,l⟩   = ω0 (l − g_m²)
//! ⟨m,l|H|m+1,k⟩ = −(Δ/2) j⁺_m ⟨l|D(−G)|k⟩,   G = 2λ/(ω0√N)
//! ```
//!
//! since `|k⟩_{A_m} = D(−g_m)|k⟩` and `g_m − g_{m+1} = −G`.

use faer::Mat;

use super::basis::ProductBasis;
use super::displacement::DisplacementTable;
use super::rotation::half_pi_rotation;
use super::{Method, ModelParams, SolverOptions, Spectrum};
use crate::{linalg, Error, Result};

/// Largest acceptable `|VᵀV − I|` entry after mapping back to the bare basis.
pub const BACK_TRANSFORM_TOLERANCE: f64 = 1e-8;

/// Norm a displaced Fock state may leak beyond the bare Fock cutoff chosen
/// for back-transformation.
const LEAKAGE: f64 = 1e-12;

/// Hamiltonian in the displaced basis; row index `s·(N_tr+1) + l`.
pub fn build_hamiltonian_ecs(p: &ModelParams) -> Result<Mat<f64>> {
    build_hamiltonian_ecs_capped(p, SolverOptions::default().dimension_cap)
}

fn build_hamiltonian_ecs_capped(p: &ModelParams, cap: usize) -> Result<Mat<f64>> {
    p.validate()?;
    let spin = ProductBasis::new(p.n_qubits, 0);
    let block = p.n_tr + 1;
    let dim = block * spin.spin_dim();
    if dim > cap {
        return Err(Error::DimensionOverflow { dimension: dim, cap });
    }
    let g_unit = p.displacement_unit();
    let overlap = DisplacementTable::new(-g_unit, block, block);
    let mut h = Mat::<f64>::zeros(dim, dim);
    for s in 0..spin.spin_dim() {
        let g = g_unit * spin.m(s);
        for l in 0..block {
            let row = s * block + l;
            h.write(row, row, p.omega0 * (l as f64 - g * g));
        }
        if s < p.n_qubits {
            let amp = -0.5 * p.delta * spin.raise(s);
            for l in 0..block {
                for k in 0..block {
                    let v = amp * overlap.get(l, k);
                    h.write(s * block + l, (s + 1) * block + k, v);
                    h.write((s + 1) * block + k, s * block + l, v);
                }
            }
        }
    }
    Ok(h)
}

pub fn ecs_energies(p: &ModelParams) -> Result<Vec<f64>> {
    ecs_energies_with(p, &SolverOptions::default())
}

pub fn ecs_energies_with(p: &ModelParams, opts: &SolverOptions) -> Result<Vec<f64>> {
    let h = build_hamiltonian_ecs_capped(p, opts.dimension_cap)?;
    Ok(linalg::symmetric_eigenvalues(h.as_ref()))
}

pub fn diagonalize_ecs(p: &ModelParams) -> Result<Spectrum> {
    diagonalize_ecs_with(p, &SolverOptions::default())
}

/// Eigenpairs from the displaced basis, with eigenvectors mapped back to the
/// bare product basis. The bare Fock cutoff of the returned spectrum is
/// chosen so that every displaced Fock state used keeps all but `1e-12` of
/// its norm.
pub fn diagonalize_ecs_with(p: &ModelParams, opts: &SolverOptions) -> Result<Spectrum> {
    let h = build_hamiltonian_ecs_capped(p, opts.dimension_cap)?;
    let (energies, coeffs) = linalg::symmetric_eigen(h.as_ref());
    let vectors = back_transform(p, coeffs.as_ref(), opts.dimension_cap)?;
    let bare_cutoff = vectors.nrows() / (p.n_qubits + 1) - 1;
    let defect = linalg::orthonormality_defect(vectors.as_ref());
    if defect > BACK_TRANSFORM_TOLERANCE {
        return Err(Error::BackTransform {
            defect,
            fock_cutoff: bare_cutoff,
        });
    }
    Ok(Spectrum::from_parts(
        energies,
        vectors,
        p.n_qubits,
        bare_cutoff,
        p.n_tr,
        Method::Ecs,
    ))
}

fn back_transform(p: &ModelParams, coeffs: faer::MatRef<'_, f64>, cap: usize) -> Result<Mat<f64>> {
    let spin = ProductBasis::new(p.n_qubits, 0);
    let block = p.n_tr + 1;
    let g_unit = p.displacement_unit();
    let max_rows = cap / spin.spin_dim();
    // The largest |g_m| needs the most Fock rows; the sign does not matter.
    let g_max = g_unit * 0.5 * p.n_qubits as f64;
    let (probe, worst) = DisplacementTable::until_complete(g_max, block, LEAKAGE, max_rows);
    if 1.0 - worst > LEAKAGE {
        return Err(Error::DimensionOverflow {
            dimension: (probe.rows() + 1) * spin.spin_dim(),
            cap,
        });
    }
    let rows = probe.rows();
    let bare = ProductBasis::new(p.n_qubits, rows - 1);
    let n_vec = coeffs.ncols();

    // Rotated-frame components ψ_s(n) = Σ_k ⟨n|D(−g_m)|k⟩ c_{s,k}.
    let mut rotated: Vec<Mat<f64>> = Vec::with_capacity(spin.spin_dim());
    for s in 0..spin.spin_dim() {
        let table = DisplacementTable::new(-g_unit * spin.m(s), rows, block);
        let t = Mat::from_fn(rows, block, |n, k| table.get(n, k));
        let c = coeffs.subrows(s * block, block);
        rotated.push(linalg::matmul(t.as_ref(), c));
    }

    // Undo the rotation: ψ_bare(n, s') = Σ_s U[s][s'] ψ_s(n).
    let u = half_pi_rotation(p.n_qubits);
    let mut out = Mat::<f64>::zeros(bare.dim(), n_vec);
    for n in 0..rows {
        for sp in 0..spin.spin_dim() {
            let row = bare.index(n, sp);
            for (s, src) in rotated.iter().enumerate() {
                let weight = u.read(s, sp);
                if weight == 0.0 {
                    continue;
                }
                for col in 0..n_vec {
                    let v = out.read(row, col) + weight * src.read(n, col);
                    out.write(row, col, v);
                }
            }
        }
    }
    Ok(out)
}
