use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Hilbert space dimension {dimension} exceeds the cap of {cap}")]
    DimensionOverflow { dimension: usize, cap: usize },

    #[error(
        "eigensolver failed on a {dimension}x{dimension} matrix: \
         residual {residual:.3e} (limit {residual_limit:.3e}), \
         orthonormality defect {orthogonality:.3e}"
    )]
    EigenFailure {
        dimension: usize,
        residual: f64,
        residual_limit: f64,
        orthogonality: f64,
    },

    #[error("back-transformed eigenvectors lost orthonormality: defect {defect:.3e} (Fock cutoff {fock_cutoff})")]
    BackTransform { defect: f64, fock_cutoff: usize },

    #[error("truncation did not converge after {attempts} doublings (last n_tr = {n_tr}, change {change:.3e})")]
    TruncationNotConverged {
        attempts: usize,
        n_tr: usize,
        change: f64,
    },

    #[error("density matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("cycle violates the Clausius inequality: Q_h = {q_hot:.6e}, Q_c = {q_cold:.6e}, W = {work:.6e}")]
    ClausiusViolation { q_hot: f64, q_cold: f64, work: f64 },

    #[error("configuration error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::DimensionOverflow { .. } => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}
