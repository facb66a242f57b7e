//! Dicke Hamiltonian construction and diagonalization.
//!
//! ```text
//! H = ω0 a†a + Δ J_z + (2λ/√N)(a† + a) J_x
//! ```
//!
//! Two independent routes are provided. The bare route works directly in
//! `|n⟩ ⊗ |j, m⟩` and is the source of eigenvectors for observables. The
//! displaced-basis route rotates the spins by π/2 about `y` and expands the
//! field around spin-dependent coherent states, which converges far faster
//! in `N_tr` at strong coupling.

mod bare;
mod basis;
pub mod displacement;
mod ecs;
mod hp;
mod rotation;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

pub use bare::{bare_energies, bare_energies_with, build_hamiltonian_bare, build_hamiltonian_bare_capped, diagonalize_bare, diagonalize_bare_with};
pub use basis::ProductBasis;
pub use ecs::{build_hamiltonian_ecs, diagonalize_ecs, diagonalize_ecs_with, ecs_energies, ecs_energies_with, BACK_TRANSFORM_TOLERANCE};
pub use hp::{hp_deep_strong_levels, hp_normal_spectrum, hp_superradiant_spectrum, DeepStrongLevels, HpLimitSpectrum, NormalModes, Phase};
pub use rotation::{build_hamiltonian_rotated, half_pi_rotation};

use crate::{linalg, Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;
pub const DEFAULT_N_TR: usize = 50;

/// Eigenvalue gap below which two levels are reported as near-degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Physical knobs of one Dicke instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega0: f64,
    pub delta: f64,
    pub lambda: f64,
    pub n_qubits: usize,
    pub n_tr: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::resonant(1.0, 0.0, 1, DEFAULT_N_TR)
    }
}

impl ModelParams {
    pub fn new(omega0: f64, delta: f64, lambda: f64, n_qubits: usize, n_tr: usize) -> Self {
        ModelParams {
            omega0,
            delta,
            lambda,
            n_qubits,
            n_tr,
        }
    }

    /// `ω0 = Δ = omega`.
    pub fn resonant(omega: f64, lambda: f64, n_qubits: usize, n_tr: usize) -> Self {
        ModelParams::new(omega, omega, lambda, n_qubits, n_tr)
    }

    pub fn is_resonant(&self) -> bool {
        self.omega0 == self.delta
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::param("omega0", format!("must be positive and finite, got {}", self.omega0)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::param("delta", format!("must be positive and finite, got {}", self.delta)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::param("lambda", format!("must be non-negative and finite, got {}", self.lambda)));
        }
        if self.n_qubits < 1 {
            return Err(Error::param("n_qubits", "must be at least 1"));
        }
        if self.n_tr < 1 {
            return Err(Error::param("n_tr", "must be at least 1"));
        }
        Ok(())
    }

    /// `(N_tr + 1)(N + 1)`.
    pub fn dimension(&self) -> usize {
        (self.n_tr + 1) * (self.n_qubits + 1)
    }

    pub fn basis(&self) -> ProductBasis {
        ProductBasis::new(self.n_qubits, self.n_tr)
    }

    pub fn with_n_tr(&self, n_tr: usize) -> Self {
        ModelParams { n_tr, ..*self }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        ModelParams { lambda, ..*self }
    }

    /// Field displacement per unit of `m`, `2λ/(ω0√N)`.
    pub fn displacement_unit(&self) -> f64 {
        2.0 * self.lambda / (self.omega0 * (self.n_qubits as f64).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Bare,
    Ecs,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Bare => "bare",
            Method::Ecs => "ecs",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bare" => Ok(Method::Bare),
            "ecs" => Ok(Method::Ecs),
            other => Err(Error::param("method", format!("expected `bare` or `ecs`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub dimension_cap: usize,
    /// Verify `‖Hv − Ev‖` and orthonormality after the bare solve.
    pub residual_check: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dimension_cap: DEFAULT_DIMENSION_CAP,
            residual_check: true,
        }
    }
}

/// Sorted eigenpairs with eigenvectors in the bare product basis.
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    eigenvectors: Mat<f64>,
    n_qubits: usize,
    fock_cutoff: usize,
    n_tr: usize,
    method: Method,
    near_degenerate: Vec<usize>,
}

impl Spectrum {
    /// Assemble from raw solver output. Each column is sign-fixed so that its
    /// largest-magnitude entry is positive, and columns inside a degenerate
    /// cluster are ordered lexicographically by their entries.
    pub(crate) fn from_parts(
        energies: Vec<f64>,
        vectors: Mat<f64>,
        n_qubits: usize,
        fock_cutoff: usize,
        n_tr: usize,
        method: Method,
    ) -> Self {
        let n = energies.len();
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut col: Vec<f64> = (0..vectors.nrows()).map(|i| vectors.read(i, k)).collect();
                let pivot = col
                    .iter()
                    .copied()
                    .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
                if pivot < 0.0 {
                    col.iter_mut().for_each(|v| *v = -*v);
                }
                col
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && energies[end] - energies[end - 1] <= 1e-12 * energies[end].abs().max(1.0) {
                end += 1;
            }
            if end - start > 1 {
                order[start..end].sort_by(|&a, &b| {
                    cols[a]
                        .iter()
                        .zip(&cols[b])
                        .map(|(x, y)| y.total_cmp(x))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            }
            start = end;
        }
        let mut sorted_cols = Vec::with_capacity(n);
        for &k in &order {
            sorted_cols.push(std::mem::take(&mut cols[k]));
        }
        let eigenvectors = Mat::from_fn(vectors.nrows(), n, |i, k| sorted_cols[k][i]);
        let near_degenerate = (1..n)
            .filter(|&k| energies[k] - energies[k - 1] < DEGENERACY_GAP)
            .collect();
        Spectrum {
            energies,
            eigenvectors,
            n_qubits,
            fock_cutoff,
            n_tr,
            method,
            near_degenerate,
        }
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Column `k` is the eigenvector of `energies()[k]`.
    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Largest Fock number of the bare basis the eigenvectors live in.
    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Truncation the Hamiltonian was diagonalized with.
    pub fn n_tr(&self) -> usize {
        self.n_tr
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn basis(&self) -> ProductBasis {
        ProductBasis::new(self.n_qubits, self.fock_cutoff)
    }

    /// Indices `k` with `E_k − E_{k−1} < 1e-8`.
    pub fn near_degenerate(&self) -> &[usize] {
        &self.near_degenerate
    }

    /// Residual and orthonormality check against the Hamiltonian `h` in the
    /// basis of the eigenvectors.
    pub fn check_residual(&self, h: MatRef<'_, f64>) -> Result<()> {
        let v = self.eigenvectors();
        let hv = linalg::matmul(h, v);
        let scale = self.energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let limit = 1e-8 * scale;
        let mut residual = 0.0f64;
        for k in 0..v.ncols() {
            let e = self.energies[k];
            let r = (0..v.nrows())
                .map(|i| (hv.read(i, k) - e * v.read(i, k)).powi(2))
                .sum::<f64>()
                .sqrt();
            residual = residual.max(r);
        }
        let orthogonality = linalg::orthonormality_defect(v);
        if residual > limit || orthogonality > 1e-10 {
            return Err(Error::EigenFailure {
                dimension: h.nrows(),
                residual,
                residual_limit: limit,
                orthogonality,
            });
        }
        Ok(())
    }
}

/// Full eigen-decomposition by the chosen route.
pub fn diagonalize(p: &ModelParams, method: Method) -> Result<Spectrum> {
    match method {
        Method::Bare => diagonalize_bare(p),
        Method::Ecs => diagonalize_ecs(p),
    }
}

/// Ascending eigenvalues by the chosen route.
pub fn energies(p: &ModelParams, method: Method) -> Result<Vec<f64>> {
    match method {
        Method::Bare => bare_energies(p),
        Method::Ecs => ecs_energies(p),
    }
}

/// `λ_c = ½ √(ω0 Δ coth(ω0 / 2T))`; `T = 0` gives `√(ω0Δ)/2` and `T = ∞`
/// gives `∞`.
pub fn critical_coupling(omega0: f64, delta: f64, temperature: f64) -> f64 {
    let coth = if temperature <= 0.0 {
        1.0
    } else if temperature.is_infinite() {
        f64::INFINITY
    } else {
        let x = omega0 / (2.0 * temperature);
        1.0 / x.tanh()
    };
    0.5 * (omega0 * delta * coth).sqrt()
}

/// Result of [`converged_energies`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedEnergies {
    pub energies: Vec<f64>,
    pub n_tr: usize,
    /// Largest relative change of the compared levels in the last doubling.
    pub change: f64,
}

/// Levels compared by the truncation auto-converge loop.
pub const CONVERGE_LEVELS: usize = 30;
/// Relative tolerance of the auto-converge loop.
pub const CONVERGE_TOLERANCE: f64 = 1e-5;

/// Largest relative change among the lowest `levels` values, with the
/// denominator floored at one.
pub fn max_relative_change(a: &[f64], b: &[f64], levels: usize) -> f64 {
    a.iter()
        .zip(b)
        .take(levels)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Double `N_tr`, starting at `p.n_tr`, until the lowest 30 energies move by
/// less than `1e-5` relative.
pub fn converged_energies(p: &ModelParams, method: Method, max_doublings: usize) -> Result<ConvergedEnergies> {
    let mut n_tr = p.n_tr;
    let mut prev = energies(&p.with_n_tr(n_tr), method)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        let next_n = n_tr * 2;
        let next = energies(&p.with_n_tr(next_n), method)?;
        change = max_relative_change(&prev, &next, CONVERGE_LEVELS);
        n_tr = next_n;
        prev = next;
        if change < CONVERGE_TOLERANCE {
            return Ok(ConvergedEnergies {
                energies: prev,
                n_tr,
                change,
            });
        }
    }
    Err(Error::TruncationNotConverged {
        attempts: max_doublings,
        n_tr,
        change,
    })
}
