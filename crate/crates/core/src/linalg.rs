//! Dense eigen-solvers and norms shared by the certification and evolution
//! modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::DenseSymMatrix;

/// Relative cutoff separating the null space from the range.
pub const NULL_SPACE_RTOL: f64 = 1e-9;

/// Eigen-decomposition `M = V diag(λ) Vᵀ` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEig {
    pub fn new(m: &DenseSymMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::Numeric("non-finite matrix entries".into()));
        }
        let n = m.dim();
        if n == 0 {
            return Ok(Self { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
        }
        let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Self { values, vectors })
    }

    /// `‖M‖₂ = max |λ|`.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
    }

    /// Indices of eigenvalues with `|λ| ≤ rtol·‖M‖₂`.
    pub fn null_indices(&self, rtol: f64) -> Vec<usize> {
        let cut = rtol * self.spectral_norm();
        (0..self.values.len()).filter(|&k| self.values[k].abs() <= cut).collect()
    }

    pub fn range_indices(&self, rtol: f64) -> Vec<usize> {
        let cut = rtol * self.spectral_norm();
        (0..self.values.len()).filter(|&k| self.values[k].abs() > cut).collect()
    }

    pub fn columns(&self, idx: &[usize]) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        let mut q = DMatrix::zeros(n, idx.len());
        for (c, &k) in idx.iter().enumerate() {
            q.set_column(c, &self.vectors.column(k));
        }
        q
    }

    /// Moore–Penrose pseudoinverse, zeroing eigenvalues below the cutoff.
    pub fn pseudoinverse(&self, rtol: f64) -> DMatrix<f64> {
        let idx = self.range_indices(rtol);
        let q = self.columns(&idx);
        let mut scaled = q.clone();
        for (c, &k) in idx.iter().enumerate() {
            let inv = 1.0 / self.values[k];
            scaled.column_mut(c).scale_mut(inv);
        }
        let p = &scaled * q.transpose();
        // Symmetrize to remove round-off asymmetry.
        (&p + p.transpose()) * 0.5
    }
}

pub fn sym_spectral_norm(m: &DenseSymMatrix) -> Result<f64> {
    Ok(SymEig::new(m)?.spectral_norm())
}

/// Largest singular value of a general real matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a: f64, x| a.max(*x))
}

/// Largest singular value of a complex matrix.
pub fn complex_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0, |a: f64, x| a.max(*x))
}
