//! Thin, single-threaded wrappers over the dense kernels in `faer`.
//!
//! Every call runs with `Parallelism::None` so results do not depend on the
//! number of worker threads; concurrency lives one level up, across
//! independent parameter points.

use faer::dyn_stack::{GlobalPodBuffer, PodStack};
use faer::linalg::evd::{compute_hermitian_evd, compute_hermitian_evd_req, ComputeVectors};
use faer::linalg::svd::{compute_svd, compute_svd_req, ComputeVectors as SvdVectors};
use faer::{Col, ComplexField, Mat, MatRef, Parallelism};

pub use faer::complex_native::c64;

/// Eigen-decomposition of a real symmetric matrix (lower triangle is read).
///
/// Eigenvalues are ascending; column `k` of the returned matrix is the
/// eigenvector for eigenvalue `k`.
pub fn symmetric_eigen(matrix: MatRef<'_, f64>) -> (Vec<f64>, Mat<f64>) {
    let dim = matrix.nrows();
    assert_eq!(dim, matrix.ncols(), "matrix must be square");
    let mut s = Col::<f64>::zeros(dim);
    let mut u = Mat::<f64>::zeros(dim, dim);
    let params = Default::default();
    let req = compute_hermitian_evd_req::<f64>(dim, ComputeVectors::Yes, Parallelism::None, params)
        .expect("eigensolver workspace size overflow");
    compute_hermitian_evd(
        matrix,
        s.as_mut(),
        Some(u.as_mut()),
        Parallelism::None,
        PodStack::new(&mut GlobalPodBuffer::new(req)),
        params,
    );
    let values: Vec<f64> = (0..dim).map(|i| s.read(i)).collect();
    sort_pairs(values, u)
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(matrix: MatRef<'_, f64>) -> Vec<f64> {
    let dim = matrix.nrows();
    assert_eq!(dim, matrix.ncols(), "matrix must be square");
    let mut s = Col::<f64>::zeros(dim);
    let params = Default::default();
    let req = compute_hermitian_evd_req::<f64>(dim, ComputeVectors::No, Parallelism::None, params)
        .expect("eigensolver workspace size overflow");
    compute_hermitian_evd(
        matrix,
        s.as_mut(),
        None,
        Parallelism::None,
        PodStack::new(&mut GlobalPodBuffer::new(req)),
        params,
    );
    let mut values: Vec<f64> = (0..dim).map(|i| s.read(i)).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Singular values in non-increasing order.
pub fn singular_values(matrix: MatRef<'_, f64>) -> Vec<f64> {
    let dim = matrix.nrows().min(matrix.ncols());
    let mut s = Col::<f64>::zeros(dim);
    let params = Default::default();
    let req = compute_svd_req::<f64>(
        matrix.nrows(),
        matrix.ncols(),
        SvdVectors::No,
        SvdVectors::No,
        Parallelism::None,
        params,
    )
    .expect("svd workspace size overflow");
    compute_svd(
        matrix,
        s.as_mut(),
        None,
        None,
        Parallelism::None,
        PodStack::new(&mut GlobalPodBuffer::new(req)),
        params,
    );
    let mut values: Vec<f64> = (0..dim).map(|i| s.read(i)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// `lhs * rhs`.
pub fn matmul<E: ComplexField>(lhs: MatRef<'_, E>, rhs: MatRef<'_, E>) -> Mat<E> {
    let mut out = Mat::<E>::zeros(lhs.nrows(), rhs.ncols());
    faer::linalg::matmul::matmul(
        out.as_mut(),
        lhs,
        rhs,
        None,
        E::faer_one(),
        Parallelism::None,
    );
    out
}

/// `Vᵀ A V` for real matrices.
pub fn congruence(v: MatRef<'_, f64>, a: MatRef<'_, f64>) -> Mat<f64> {
    let av = matmul(a, v);
    matmul(v.transpose(), av.as_ref())
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a.read(i, j) - b.read(i, j)).abs());
        }
    }
    worst
}

/// Largest entry of `|Vᵀ V - I|`.
pub fn orthonormality_defect(v: MatRef<'_, f64>) -> f64 {
    let gram = matmul(v.transpose(), v);
    let mut worst = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram.read(i, j) - target).abs());
        }
    }
    worst
}

fn sort_pairs(values: Vec<f64>, vectors: Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    if values.windows(2).all(|w| w[0] <= w[1]) {
        return (values, vectors);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = Mat::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors.read(i, order[j])
    });
    (sorted_values, sorted_vectors)
}
