//! Complex matrices and Hermitian operators.
//!
//! Hermitian operators on `C^d` are also handled through their real
//! coordinates in the orthonormal Hilbert-Schmidt basis
//! `{E_ii} ∪ {(E_ij + E_ji)/√2} ∪ {i(E_ij - E_ji)/√2}` (for `i < j`), so that
//! `tr(A B)` equals the Euclidean dot product of the coordinate vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Largest entrywise modulus of `a - a^*`.
pub fn hermiticity_residual(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues in ascending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates squareness and Hermiticity, then stores the exactly
    /// symmetrized matrix `(a + a^*)/2`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::domain(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::domain("operator dimension must be positive"));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("operator has non-finite entries"));
        }
        let residual = hermiticity_residual(&matrix);
        if residual > tolerance::HERM {
            return Err(Error::domain(format!(
                "operator is not Hermitian (residual {residual:.3e})"
            )));
        }
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { matrix: sym })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn zero(dim: usize) -> Self {
        Self::scaled_identity(dim, 0.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim).scale(c),
        }
    }

    /// `|v><v|` for the given vector (not normalized here).
    pub fn outer(v: &DVector<C64>) -> Self {
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// `Re tr(self · other)`.
    pub fn hs_inner(&self, other: &HermitianOperator) -> f64 {
        // tr(AB) = sum_ij A_ij B_ji
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.matrix[(i, j)] * other.matrix[(j, i)]).re;
            }
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, c: f64) -> HermitianOperator {
        Self {
            matrix: self.matrix.scale(c),
        }
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: f64, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix + other.matrix.scale(c),
        }
    }

    /// `u · self · u^*`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> HermitianOperator {
        let m = u * &self.matrix * u.adjoint();
        Self {
            matrix: (&m + m.adjoint()).scale(0.5),
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `self^2 == self` entrywise within `tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix) <= tol
    }

    pub fn eigen(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors =
            ComplexMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());
        Spectrum { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("dimension is positive")
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        let ev = self.eigenvalues();
        ev[0].abs().max(ev[ev.len() - 1].abs())
    }

    /// Real coordinates in the orthonormal Hilbert-Schmidt basis, length `d²`.
    pub fn coords(&self) -> DVector<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            out.push(self.matrix[(i, i)].re);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let z = self.matrix[(i, j)];
                out.push(SQRT_2 * z.re);
                out.push(SQRT_2 * z.im);
            }
        }
        DVector::from_vec(out)
    }

    /// Inverse of [`HermitianOperator::coords`].
    pub fn from_coords(dim: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), dim * dim, "coordinate vector has wrong length");
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(coords[i], 0.0);
        }
        let mut k = dim;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let z = C64::new(coords[k], coords[k + 1]) / SQRT_2;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        Self { matrix: m }
    }
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(a: &HermitianOperator) -> f64 {
    a.min_eigenvalue()
}

/// Operator norm `max |λ|` of a Hermitian operator.
pub fn operator_norm(a: &HermitianOperator) -> f64 {
    a.operator_norm()
}

/// Orthonormal basis (as columns) of the null space of a real matrix, using
/// singular values `<= threshold`. Each nonzero row is first scaled to unit
/// length; row scaling leaves the null space unchanged and keeps tiny but
/// genuinely independent rows above the threshold.
pub fn null_space(rows: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let ncols = rows.ncols();
    let mut scaled: Vec<DVector<f64>> = Vec::new();
    for r in 0..rows.nrows() {
        let row = rows.row(r).transpose();
        let n = row.norm();
        if n > 0.0 {
            scaled.push(row / n);
        }
    }
    if scaled.is_empty() {
        return DMatrix::identity(ncols, ncols);
    }
    // Pad to at least ncols rows so the SVD returns a complete right basis.
    let nrows = scaled.len().max(ncols);
    let mut m = DMatrix::<f64>::zeros(nrows, ncols);
    for (r, row) in scaled.iter().enumerate() {
        m.set_row(r, &row.transpose());
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let null_cols: Vec<DVector<f64>> = (0..v_t.nrows())
        .filter(|&k| svd.singular_values[k] <= threshold)
        .map(|k| v_t.row(k).transpose())
        .collect();
    if null_cols.is_empty() {
        DMatrix::zeros(ncols, 0)
    } else {
        DMatrix::from_columns(&null_cols)
    }
}
