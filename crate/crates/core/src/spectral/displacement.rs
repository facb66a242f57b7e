//! Fock-basis matrix elements of the real displacement operator
//! `D(α) = exp(α(a† − a))`.
//!
//! The closed form is an alternating factorial sum whose terms grow like
//! `e^{α²}` before cancelling, so for `α ≳ 2` and quantum numbers near 50 it
//! loses every significant digit. The table is instead assembled from the
//! associated Laguerre form, for `a ≥ 0`,
//!
//! ```text
//! ⟨q+a|D(α)|q⟩ = √(q!/(q+a)!) α^a e^{−α²/2} L_q^{(a)}(α²)
//! ⟨q|D(α)|q+a⟩ = (−1)^a ⟨q+a|D(α)|q⟩
//! ```
//!
//! with the factorial prefactor accumulated in the log domain and
//! `L_q^{(a)}` advanced by its three-term recurrence in the degree `q`.

/// Dense table `⟨l|D(α)|k⟩` for `l ∈ 0..rows`, `k ∈ 0..cols`, row-major.
#[derive(Debug, Clone)]
pub struct DisplacementTable {
    alpha: f64,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DisplacementTable {
    pub fn new(alpha: f64, rows: usize, cols: usize) -> Self {
        let mut data = vec![0.0; rows * cols];
        if alpha == 0.0 {
            for i in 0..rows.min(cols) {
                data[i * cols + i] = 1.0;
            }
            return DisplacementTable { alpha, rows, cols, data };
        }
        let x = alpha * alpha;
        let ln_abs_alpha = alpha.abs().ln();
        let ln_fact = log_factorials(rows.max(cols));
        let alpha_negative = alpha < 0.0;
        // Lower triangle (l = q + a, k = q) and its mirror.
        for a in 0..rows.max(cols) {
            let max_q_lower = if a < rows { (rows - a).min(cols) } else { 0 };
            let max_q_upper = if a < cols { (cols - a).min(rows) } else { 0 };
            let count = max_q_lower.max(max_q_upper);
            if count == 0 {
                continue;
            }
            let sign_alpha_a = if alpha_negative && a % 2 == 1 { -1.0 } else { 1.0 };
            let mirror = if a % 2 == 1 { -1.0 } else { 1.0 };
            let af = a as f64;
            // L_{q-1}, L_q with a shared power-of-two scale exponent.
            let mut prev = 0.0f64;
            let mut cur = 1.0f64;
            let mut ln_scale = 0.0f64;
            for q in 0..count {
                if q > 0 {
                    let n = (q - 1) as f64;
                    let next = ((2.0 * n + 1.0 + af - x) * cur - (n + af) * prev) / (n + 1.0);
                    prev = cur;
                    cur = next;
                    let mag = cur.abs().max(prev.abs());
                    if mag > 1e200 {
                        prev *= 1e-200;
                        cur *= 1e-200;
                        ln_scale += 200.0 * std::f64::consts::LN_10;
                    }
                }
                let ln_pref = 0.5 * (ln_fact[q] - ln_fact[q + a]) + af * ln_abs_alpha - 0.5 * x + ln_scale;
                let value = if cur == 0.0 {
                    0.0
                } else {
                    sign_alpha_a * cur.signum() * (ln_pref + cur.abs().ln()).exp()
                };
                if q < max_q_lower {
                    data[(q + a) * cols + q] = value;
                }
                if a > 0 && q < max_q_upper {
                    data[q * cols + q + a] = mirror * value;
                }
            }
        }
        DisplacementTable { alpha, rows, cols, data }
    }

    /// Grows the row count until every column `k` carries at least `1 − tol`
    /// of its norm in the retained rows, or `max_rows` is reached.
    ///
    /// Returns the table and the smallest retained column norm.
    pub fn until_complete(alpha: f64, cols: usize, tol: f64, max_rows: usize) -> (Self, f64) {
        let reach = (((cols as f64).sqrt() + alpha.abs()).powi(2)).ceil() as usize;
        let mut rows = (reach + 16).max(cols).min(max_rows);
        loop {
            let table = DisplacementTable::new(alpha, rows, cols);
            let worst = table.min_column_norm();
            if 1.0 - worst <= tol || rows >= max_rows {
                return (table, worst);
            }
            rows = (rows + rows / 4 + 8).min(max_rows);
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, l: usize, k: usize) -> f64 {
        self.data[l * self.cols + k]
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.data[l * self.cols..(l + 1) * self.cols]
    }

    fn min_column_norm(&self) -> f64 {
        let mut norms = vec![0.0f64; self.cols];
        for l in 0..self.rows {
            for (n, x) in norms.iter_mut().zip(self.row(l)) {
                *n += x * x;
            }
        }
        norms.into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// `ln(n!)` for `n ∈ 0..=max`.
pub(crate) fn log_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for n in 1..=max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}
