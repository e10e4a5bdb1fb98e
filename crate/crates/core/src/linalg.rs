//! Dense complex matrices standing in for operators on finite models.
//!
//! Entries are always the matrix of the operator in an orthonormal basis, so
//! singular values and Schatten norms can be read off directly. The
//! `cell_weight` records the measure of one basis cell and is used by callers
//! to translate between kernel values and matrix entries.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Singular values below this fraction of the largest one are treated as zero.
pub const SVD_CLAMP: f64 = 1e-12;

const SVD_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    entries: CMatrix,
    cell_weight: f64,
}

impl DenseOperator {
    pub fn new(entries: CMatrix, cell_weight: f64) -> Result<Self> {
        ensure(cell_weight.is_finite() && cell_weight > 0.0, || {
            format!("cell weight must be positive and finite, got {cell_weight}")
        })?;
        ensure(entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()), || {
            "operator entries must be finite".to_string()
        })?;
        Ok(Self { entries, cell_weight })
    }

    /// Discretizes an integral kernel sampled on cells of measure `cell_weight`.
    pub fn from_kernel(kernel: CMatrix, cell_weight: f64) -> Result<Self> {
        let entries = kernel * C64::new(cell_weight, 0.0);
        Self::new(entries, cell_weight)
    }

    pub fn diagonal(values: &[C64], cell_weight: f64) -> Result<Self> {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Self::new(m, cell_weight)
    }

    pub fn identity(n: usize, cell_weight: f64) -> Result<Self> {
        Self::new(CMatrix::identity(n, n), cell_weight)
    }

    pub fn zeros(rows: usize, cols: usize, cell_weight: f64) -> Result<Self> {
        Self::new(CMatrix::zeros(rows, cols), cell_weight)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), cell_weight: self.cell_weight }
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        ensure(self.ncols() == rhs.nrows(), || {
            format!("cannot compose {}x{} with {}x{}", self.nrows(), self.ncols(), rhs.nrows(), rhs.ncols())
        })?;
        Ok(Self { entries: &self.entries * &rhs.entries, cell_weight: self.cell_weight })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        ensure(self.entries.shape() == rhs.entries.shape(), || "shape mismatch in sum".to_string())?;
        Ok(Self { entries: &self.entries + &rhs.entries, cell_weight: self.cell_weight })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        ensure(self.entries.shape() == rhs.entries.shape(), || "shape mismatch in difference".to_string())?;
        Ok(Self { entries: &self.entries - &rhs.entries, cell_weight: self.cell_weight })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { entries: &self.entries * c, cell_weight: self.cell_weight }
    }

    /// Kronecker product; the cell weights multiply.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self { entries: self.entries.kronecker(&rhs.entries), cell_weight: self.cell_weight * rhs.cell_weight }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        if self.nrows() != self.ncols() {
            return f64::INFINITY;
        }
        let d = &self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// Singular values in non-increasing order, tiny ones clamped to zero.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.entries)
    }

    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        ensure(self.nrows() == self.ncols(), || "eigen-decomposition needs a square operator".to_string())?;
        ensure(self.is_hermitian(1e-10), || "operator is not Hermitian".to_string())?;
        hermitian_eigen(&self.entries)
    }
}

pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure(format!("SVD of {}x{} matrix did not converge", m.nrows(), m.ncols())))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite singular value".into()));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    let cut = s.first().copied().unwrap_or(0.0) * SVD_CLAMP;
    for v in &mut s {
        if *v < cut {
            *v = 0.0;
        }
    }
    Ok(s)
}

/// Hermitian eigen-decomposition; eigenvalues ascending, eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    // symmetrize to kill roundoff asymmetry
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure(format!("eigen-decomposition of {n}x{n} matrix did not converge")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Sum of `lambda_i v_i v_i^*` over the selected eigenpairs.
pub fn spectral_sum(values: &[f64], vectors: &CMatrix, mut keep: impl FnMut(f64) -> Option<f64>) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &lam) in values.iter().enumerate() {
        if let Some(w) = keep(lam) {
            let v = vectors.column(i);
            out += (v * v.adjoint()) * C64::new(w, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let op = DenseOperator::diagonal(&[C64::new(0.0, -3.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)], 1.0).unwrap();
        assert_eq!(op.singular_values().unwrap(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn clamp_kills_roundoff_singular_values() {
        let m = CMatrix::from_fn(3, 3, |_, _| C64::new(1.0, 0.0));
        let s = singular_values(&m).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-12);
        assert_eq!(&s[1..], &[0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_weight_and_nan() {
        assert!(DenseOperator::identity(2, 0.0).is_err());
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(DenseOperator::new(m, 1.0).is_err());
    }

    #[test]
    fn eigen_reconstructs() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let back = spectral_sum(&vals, &vecs, Some);
        assert!((back - m).norm() < 1e-12);
    }
}
