use faer::Mat;

use super::basis::ProductBasis;
use super::ModelParams;
use crate::linalg;

/// `U = exp(iπ J_y / 2)` on the spin-`N/2` multiplet, as a real orthogonal
/// matrix in the `|j, m⟩` basis (ascending `m`).
///
/// It maps `U J_z U† = −J_x` and `U J_x U† = J_z`, which takes the Dicke
/// Hamiltonian to `ω0 a†a − (Δ/2)(J₊ + J₋) + (2λ/√N)(a† + a) J_z`.
pub fn half_pi_rotation(n_qubits: usize) -> Mat<f64> {
    let basis = ProductBasis::new(n_qubits, 0);
    let d = basis.spin_dim();
    // iJ_y = (J₊ − J₋)/2 is real antisymmetric.
    let mut generator = Mat::<f64>::zeros(d, d);
    for s in 0..n_qubits {
        let amp = 0.5 * basis.raise(s) * std::f64::consts::FRAC_PI_2;
        generator.write(s + 1, s, amp);
        generator.write(s, s + 1, -amp);
    }
    expm(generator)
}

/// The rotated Hamiltonian `H_s` written out directly in the product basis.
pub fn build_hamiltonian_rotated(p: &ModelParams) -> Mat<f64> {
    let basis = p.basis();
    let mut h = Mat::<f64>::zeros(basis.dim(), basis.dim());
    let coupling = 2.0 * p.lambda / (p.n_qubits as f64).sqrt();
    for n in 0..basis.fock_dim() {
        for s in 0..basis.spin_dim() {
            let row = basis.index(n, s);
            h.write(row, row, p.omega0 * n as f64);
            if s < p.n_qubits {
                let col = basis.index(n, s + 1);
                let v = -0.5 * p.delta * basis.raise(s);
                h.write(row, col, v);
                h.write(col, row, v);
            }
            if n < basis.fock_cutoff {
                let col = basis.index(n + 1, s);
                let v = coupling * basis.m(s) * ((n + 1) as f64).sqrt();
                h.write(row, col, v);
                h.write(col, row, v);
            }
        }
    }
    h
}

// Scaling and squaring with a Taylor kernel; the argument is at most a
// few dozen in norm and the result is orthogonal, so squaring is benign.
fn expm(a: Mat<f64>) -> Mat<f64> {
    let d = a.nrows();
    let norm = (0..d)
        .map(|i| (0..d).map(|j| a.read(i, j).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = Mat::from_fn(d, d, |i, j| a.read(i, j) * scale);
    let mut result = Mat::<f64>::identity(d, d);
    let mut term = Mat::<f64>::identity(d, d);
    for k in 1..=18 {
        term = linalg::matmul(term.as_ref(), scaled.as_ref());
        let inv = 1.0 / k as f64;
        term = Mat::from_fn(d, d, |i, j| term.read(i, j) * inv);
        result = Mat::from_fn(d, d, |i, j| result.read(i, j) + term.read(i, j));
    }
    for _ in 0..squarings {
        result = linalg::matmul(result.as_ref(), result.as_ref());
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin_matrices(n_qubits: usize) -> (Mat<f64>, Mat<f64>) {
        let basis = ProductBasis::new(n_qubits, 0);
        let d = basis.spin_dim();
        let jz = Mat::from_fn(d, d, |i, j| if i == j { basis.m(i) } else { 0.0 });
        let jx = Mat::from_fn(d, d, |i, j| {
            if i == j + 1 {
                0.5 * basis.raise(j)
            } else if j == i + 1 {
                0.5 * basis.raise(i)
            } else {
                0.0
            }
        });
        (jz, jx)
    }

    #[test]
    fn spin_half_closed_form() {
        let u = half_pi_rotation(1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // cos(π/4) + i sin(π/4) σ_y in the (↓, ↑) ordering.
        let expected = [[r, -r], [r, r]];
        for (i, row) in expected.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!((u.read(i, j) - x).abs() < 1e-15, "{i}{j}");
            }
        }
    }

    #[test]
    fn maps_jz_to_minus_jx() {
        for n in [1, 2, 5, 8, 17, 64] {
            let u = half_pi_rotation(n);
            assert!(linalg::orthonormality_defect(u.as_ref()) < 1e-12, "N={n}");
            let (jz, jx) = spin_matrices(n);
            let rotated_z = linalg::matmul(linalg::matmul(u.as_ref(), jz.as_ref()).as_ref(), u.transpose());
            let minus_jx = Mat::from_fn(n + 1, n + 1, |i, j| -jx.read(i, j));
            assert!(linalg::max_abs_diff(rotated_z.as_ref(), minus_jx.as_ref()) < 1e-10, "N={n}");
            let rotated_x = linalg::matmul(linalg::matmul(u.as_ref(), jx.as_ref()).as_ref(), u.transpose());
            assert!(linalg::max_abs_diff(rotated_x.as_ref(), jz.as_ref()) < 1e-10, "N={n}");
        }
    }
}
