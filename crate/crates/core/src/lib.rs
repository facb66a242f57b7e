//! Four-stroke quantum Otto machine whose working substance is the open Dicke
//! model: `N` two-level systems collectively coupled to a single bosonic mode.
//!
//! The crate is split along the pipeline:
//!
//! * [`spectral`] builds and diagonalizes the Dicke Hamiltonian, either in the
//!   bare Fock ⊗ Dicke basis or with displaced (extended coherent state)
//!   bosonic bases, and provides Holstein-Primakoff limit spectra.
//! * [`cycle`] turns spectra into steady-state populations, runs the Otto
//!   cycle and classifies the machine regime.
//! * [`correlations`] evaluates second-order photon correlations and
//!   photon-qubit negativity of the thermal working substance.
//! * [`sweep`] drives parameter grids and writes CSV/JSON artifacts.
//!
//! All energies and temperatures are in units of the reference frequency
//! `ω` with `ħ = k_B = 1`.

pub mod correlations;
pub mod cycle;
mod error;
pub mod linalg;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
