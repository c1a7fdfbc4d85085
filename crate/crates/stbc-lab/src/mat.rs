//! Minimal dense complex-matrix kernel.
//!
//! Everything else in the crate stores codewords, weight matrices, channels,
//! and Gram matrices in [`CMat`]. Matrices in scope are tiny (at most a few
//! dozen rows), so the kernel favors clarity over performance: row-major
//! storage, elimination-based determinant and rank, no sparsity.
//!
//! Equality of floating matrices is always tolerance-based; see
//! [`CMat::approx_eq`]. Constructors reject non-finite entries so NaN and
//! infinity never enter stored matrices.

use num_complex::Complex64;

/// Shorthand for building a complex scalar.
#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    /// Builds a matrix from row-major data.
    ///
    /// # Panics
    /// Panics if the data length does not equal `rows * cols` or any entry is
    /// not finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        assert!(
            data.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "matrix entries must be finite"
        );
        Self { rows, cols, data }
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cx(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Builds a matrix from nested row vectors.
    ///
    /// # Panics
    /// Panics if rows are ragged or empty.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::new(
            rows.len(),
            cols,
            rows.iter().flat_map(|r| r.iter().copied()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `r` as a slice.
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Raw row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn conj_transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Matrix product `self * rhs`.
    ///
    /// # Panics
    /// Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// Entrywise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + rhs[(r, c)])
    }

    /// Entrywise difference.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - rhs[(r, c)])
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |r, c| s * self[(r, c)])
    }

    /// Sum of diagonal entries.
    ///
    /// # Panics
    /// Panics if the matrix is not square.
    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace needs a square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every entry magnitude is at most `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Tolerance-based equality: max entrywise difference at most `tol`.
    pub fn approx_eq(&self, other: &CMat, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.sub(other).is_zero(tol)
    }

    /// Determinant by partially pivoted Gaussian elimination.
    ///
    /// # Panics
    /// Panics if the matrix is not square.
    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = cx(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap();
            if a[(pivot, col)] == Complex64::ZERO {
                return Complex64::ZERO;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let factor = a[(r, col)] / p;
                if factor == Complex64::ZERO {
                    continue;
                }
                for c in col..n {
                    let sub = factor * a[(col, c)];
                    a[(r, c)] -= sub;
                }
            }
        }
        det
    }

    /// Numeric rank: pivots with magnitude above `tol` under fully pivoted
    /// elimination.
    pub fn numeric_rank(&self, tol: f64) -> usize {
        assert!(tol > 0.0, "rank tolerance must be positive");
        let mut a = self.clone();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        for step in 0..m.min(n) {
            let mut best = (step, step, 0.0f64);
            for r in step..m {
                for c in step..n {
                    let mag = a[(r, c)].norm();
                    if mag > best.2 {
                        best = (r, c, mag);
                    }
                }
            }
            if best.2 <= tol {
                break;
            }
            a.swap_rows(best.0, step);
            a.swap_cols(best.1, step);
            rank += 1;
            let p = a[(step, step)];
            for r in step + 1..m {
                let factor = a[(r, step)] / p;
                if factor == Complex64::ZERO {
                    continue;
                }
                for c in step..n {
                    let sub = factor * a[(step, c)];
                    a[(r, c)] -= sub;
                }
            }
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}
