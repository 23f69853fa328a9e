//! Loewner-order certificates for sparsified Laplacians and the induced
//! adjacency-matrix closeness bound.
//!
//! The Laplacian check solves the generalized eigenproblem of the pencil
//! `(L̃, L)` on `range(L)`: with `L = Q Λ Qᵀ` restricted to its nonzero
//! eigenvalues, the pencil eigenvalues are those of `Λ^{-1/2} Qᵀ L̃ Q Λ^{-1/2}`.
//! Vectors in `ker(L)` must also be annihilated by `L̃`; otherwise no finite
//! `ε` works and the check fails with [`Error::KernelNotContained`].

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DegreeDiagonal, DenseSymMatrix};
use crate::linalg::{SymEig, NULL_SPACE_RTOL};

/// Relative tolerance for `‖L̃ v‖ ≤ tol·‖L̃‖₂` on kernel vectors `v` of `L`.
pub const KERNEL_LEAK_RTOL: f64 = 1e-8;
/// Relative PSD tolerance on the smallest eigenvalue.
pub const PSD_RTOL: f64 = 1e-9;
/// Round-off allowance on the pencil verdict, so `L̃ = L` passes at `ε = 0`.
pub const PENCIL_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianCertificate {
    pub epsilon: f64,
    pub pencil_min: f64,
    pub pencil_max: f64,
    pub epsilon_measured: f64,
    pub kernel_dim: usize,
    pub kernel_leak: f64,
    pub null_space_rtol: f64,
    pub kernel_leak_rtol: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyCertificate {
    pub eps_prime: f64,
    pub deviation: f64,
    pub max_degree: f64,
    pub bound: f64,
    pub verdict: bool,
}

/// Both certificates plus the measured degree concentration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCertificate {
    pub laplacian: LaplacianCertificate,
    pub adjacency: AdjacencyCertificate,
    pub eps_tilde_measured: f64,
}

impl SpectralCertificate {
    pub fn passed(&self) -> bool {
        self.laplacian.verdict && self.adjacency.verdict
    }
}

/// Eigendata of a reference Laplacian, reusable across many candidates.
#[derive(Debug, Clone)]
pub struct LaplacianReference {
    dim: usize,
    range_basis: DMatrix<f64>,
    inv_sqrt: Vec<f64>,
    kernel: DMatrix<f64>,
}

impl LaplacianReference {
    pub fn new(l: &DenseSymMatrix) -> Result<Self> {
        let eig = SymEig::new(l)?;
        let norm = eig.spectral_norm();
        if !eig.values.is_empty() && eig.values[0] < -PSD_RTOL * norm {
            return Err(Error::InvalidParameter(format!(
                "reference matrix is not PSD (min eigenvalue {:.3e})",
                eig.values[0]
            )));
        }
        let range = eig.range_indices(NULL_SPACE_RTOL);
        let null = eig.null_indices(NULL_SPACE_RTOL);
        Ok(Self {
            dim: l.dim(),
            range_basis: eig.columns(&range),
            inv_sqrt: range.iter().map(|&k| eig.values[k].sqrt().recip()).collect(),
            kernel: eig.columns(&null),
        })
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn certify(&self, lt: &DenseSymMatrix, epsilon: f64) -> Result<LaplacianCertificate> {
        if lt.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, lt.dim()));
        }
        let lt_eig = SymEig::new(lt)?;
        let lt_norm = lt_eig.spectral_norm();
        if !lt_eig.values.is_empty() && lt_eig.values[0] < -PSD_RTOL * lt_norm {
            return Err(Error::InvalidParameter(format!(
                "candidate matrix is not PSD (min eigenvalue {:.3e})",
                lt_eig.values[0]
            )));
        }
        let ltm = lt.as_matrix();
        let mut leak: f64 = 0.0;
        for v in self.kernel.column_iter() {
            leak = leak.max((ltm * v).norm());
        }
        let tol = KERNEL_LEAK_RTOL * lt_norm;
        if leak > tol {
            return Err(Error::KernelNotContained { leak, tol });
        }

        let (pencil_min, pencil_max) = if self.range_basis.ncols() == 0 {
            (1.0, 1.0)
        } else {
            let mut reduced = self.range_basis.transpose() * ltm * &self.range_basis;
            let r = reduced.nrows();
            for i in 0..r {
                for j in 0..r {
                    reduced[(i, j)] *= self.inv_sqrt[i] * self.inv_sqrt[j];
                }
            }
            let pencil = SymEig::new(&DenseSymMatrix::from_matrix(reduced)?)?;
            (pencil.values[0], pencil.values[r - 1])
        };
        let epsilon_measured = (1.0 - pencil_min).max(pencil_max - 1.0).max(0.0);
        let verdict = pencil_min >= 1.0 - epsilon - PENCIL_ATOL && pencil_max <= 1.0 + epsilon + PENCIL_ATOL;
        Ok(LaplacianCertificate {
            epsilon,
            pencil_min,
            pencil_max,
            epsilon_measured,
            kernel_dim: self.kernel_dim(),
            kernel_leak: leak,
            null_space_rtol: NULL_SPACE_RTOL,
            kernel_leak_rtol: KERNEL_LEAK_RTOL,
            verdict,
        })
    }
}

/// Checks `(1−ε) L ⪯ L̃ ⪯ (1+ε) L` (closed interval).
pub fn certify_laplacian(l: &DenseSymMatrix, lt: &DenseSymMatrix, epsilon: f64) -> Result<LaplacianCertificate> {
    LaplacianReference::new(l)?.certify(lt, epsilon)
}

/// Checks `|xᵀ(Ã − A)x| ≤ ε′ xᵀx maxᵢ Dᵢᵢ` for all `x`, i.e.
/// `‖Ã − A‖₂ ≤ ε′ maxᵢ Dᵢᵢ`.
pub fn certify_adjacency(
    a: &DenseSymMatrix,
    at: &DenseSymMatrix,
    d: &DegreeDiagonal,
    eps_prime: f64,
) -> Result<AdjacencyCertificate> {
    if a.dim() != at.dim() {
        return Err(Error::DimensionMismatch(a.dim(), at.dim()));
    }
    if d.0.len() != a.dim() {
        return Err(Error::DimensionMismatch(a.dim(), d.0.len()));
    }
    let deviation = SymEig::new(&at.sub(a))?.spectral_norm();
    let max_degree = d.max();
    let bound = eps_prime * max_degree;
    Ok(AdjacencyCertificate { eps_prime, deviation, max_degree, bound, verdict: deviation <= bound })
}

/// `maxᵢ |D̃ᵢᵢ − Dᵢᵢ| / Dᵢᵢ` over vertices with `Dᵢᵢ > 0`.
pub fn eps_tilde_measured(d: &DegreeDiagonal, dt: &DegreeDiagonal) -> f64 {
    d.0.iter()
        .zip(&dt.0)
        .filter(|(di, _)| **di > 0.0)
        .map(|(di, ti)| (ti - di).abs() / di)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Upper,
    Lower,
}

/// Union-bounded Chernoff tail for the degree deviation, with
/// `minᵢ Dᵢᵢ = (ln n)^α`: `n·exp(−ε̃² (ln n)^α / k)`, `k = 3` upper and
/// `k = 2` lower, clamped to `[0, 1]`.
pub fn eps_tilde_tail_bound(n: usize, eps_tilde: f64, alpha: f64, side: TailSide) -> f64 {
    let k = match side {
        TailSide::Upper => 3.0,
        TailSide::Lower => 2.0,
    };
    let n = n as f64;
    let log_bound = n.ln() - eps_tilde * eps_tilde * n.ln().powf(alpha) / k;
    log_bound.exp().clamp(0.0, 1.0)
}

/// The `α` for which `(ln n)^α` equals the smallest degree.
pub fn implied_alpha(n: usize, min_degree: f64) -> f64 {
    min_degree.ln() / (n as f64).ln().ln()
}

pub fn combine_epsilons(epsilon: f64, eps_tilde: f64) -> f64 {
    epsilon + eps_tilde
}
