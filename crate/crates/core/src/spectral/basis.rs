use faer::{Mat, MatRef};

/// Product basis `|n⟩_Fock ⊗ |j, m⟩` with `j = N/2`.
///
/// Row index is `n·(N+1) + s` where `s = m + N/2 ∈ 0..=N` is the spin slot,
/// so the Fock number is the slow index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBasis {
    pub n_qubits: usize,
    pub fock_cutoff: usize,
}

impl ProductBasis {
    pub fn new(n_qubits: usize, fock_cutoff: usize) -> Self {
        ProductBasis {
            n_qubits,
            fock_cutoff,
        }
    }

    #[inline]
    pub fn spin_dim(&self) -> usize {
        self.n_qubits + 1
    }

    #[inline]
    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.fock_dim() * self.spin_dim()
    }

    #[inline]
    pub fn index(&self, n: usize, s: usize) -> usize {
        n * self.spin_dim() + s
    }

    /// `(n, s)` of a row index.
    #[inline]
    pub fn split(&self, row: usize) -> (usize, usize) {
        (row / self.spin_dim(), row % self.spin_dim())
    }

    /// Magnetic quantum number of spin slot `s`.
    #[inline]
    pub fn m(&self, s: usize) -> f64 {
        s as f64 - 0.5 * self.n_qubits as f64
    }

    /// `j⁺_m = √(j(j+1) − m(m+1))`, the amplitude of `J₊|j,m⟩`.
    #[inline]
    pub fn raise(&self, s: usize) -> f64 {
        let j = 0.5 * self.n_qubits as f64;
        let m = self.m(s);
        (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }

    /// Photon quadrature `a + a†` on the full product space.
    pub fn quadrature(&self) -> Mat<f64> {
        let mut x = Mat::<f64>::zeros(self.dim(), self.dim());
        for n in 0..self.fock_cutoff {
            let amp = ((n + 1) as f64).sqrt();
            for s in 0..self.spin_dim() {
                let (lo, hi) = (self.index(n, s), self.index(n + 1, s));
                x.write(lo, hi, amp);
                x.write(hi, lo, amp);
            }
        }
        x
    }

    /// `J₊ + J₋` on the full product space.
    pub fn spin_flip(&self) -> Mat<f64> {
        let mut x = Mat::<f64>::zeros(self.dim(), self.dim());
        for n in 0..self.fock_dim() {
            for s in 0..self.n_qubits {
                let amp = self.raise(s);
                let (lo, hi) = (self.index(n, s), self.index(n, s + 1));
                x.write(lo, hi, amp);
                x.write(hi, lo, amp);
            }
        }
        x
    }

    /// Diagonal of the photon number operator.
    pub fn photon_numbers(&self) -> Vec<f64> {
        (0..self.dim()).map(|row| self.split(row).0 as f64).collect()
    }

    /// `(a + a†) v` for each column of `v`, without forming the operator.
    pub fn apply_quadrature(&self, v: MatRef<'_, f64>) -> Mat<f64> {
        let mut out = Mat::<f64>::zeros(self.dim(), v.ncols());
        for col in 0..v.ncols() {
            for n in 0..self.fock_cutoff {
                let amp = ((n + 1) as f64).sqrt();
                for s in 0..self.spin_dim() {
                    let (lo, hi) = (self.index(n, s), self.index(n + 1, s));
                    out.write(lo, col, out.read(lo, col) + amp * v.read(hi, col));
                    out.write(hi, col, out.read(hi, col) + amp * v.read(lo, col));
                }
            }
        }
        out
    }

    /// `(J₊ + J₋) v` for each column of `v`.
    pub fn apply_spin_flip(&self, v: MatRef<'_, f64>) -> Mat<f64> {
        let mut out = Mat::<f64>::zeros(self.dim(), v.ncols());
        for col in 0..v.ncols() {
            for n in 0..self.fock_dim() {
                for s in 0..self.n_qubits {
                    let amp = self.raise(s);
                    let (lo, hi) = (self.index(n, s), self.index(n, s + 1));
                    out.write(lo, col, out.read(lo, col) + amp * v.read(hi, col));
                    out.write(hi, col, out.read(hi, col) + amp * v.read(lo, col));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn sparse_actions_match_dense_operators() {
        let basis = ProductBasis::new(3, 5);
        let v = Mat::from_fn(basis.dim(), 4, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let dense = linalg::matmul(basis.quadrature().as_ref(), v.as_ref());
        assert!(linalg::max_abs_diff(dense.as_ref(), basis.apply_quadrature(v.as_ref()).as_ref()) < 1e-13);
        let dense = linalg::matmul(basis.spin_flip().as_ref(), v.as_ref());
        assert!(linalg::max_abs_diff(dense.as_ref(), basis.apply_spin_flip(v.as_ref()).as_ref()) < 1e-13);
    }

    #[test]
    fn index_round_trip() {
        let basis = ProductBasis::new(4, 6);
        for row in 0..basis.dim() {
            let (n, s) = basis.split(row);
            assert_eq!(basis.index(n, s), row);
        }
        assert_eq!(basis.m(0), -2.0);
        assert_eq!(basis.raise(4), 0.0);
        assert_eq!(basis.raise(2), 6f64.sqrt());
    }
}
