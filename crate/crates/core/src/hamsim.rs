//! Unitary evolution `e^{−iHt}` for real symmetric `H` and the discrepancy
//! between evolutions under a Hamiltonian and its sparsifier.
//!
//! All error comparisons are on squared norms: the quantity bounded by
//! `ε′²(t‖H‖)²` is `‖(Ũ − U)ψ‖²`, maximized over states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DenseSymMatrix;
use crate::linalg::{complex_spectral_norm, spectral_norm, SymEig};
use crate::par::Execution;

pub const MAX_EVOLUTION_DIM: usize = 512;
/// `‖[H, H̃]‖₂ ≤ COMMUTE_RTOL·‖H‖₂‖H̃‖₂` counts as commuting.
pub const COMMUTE_RTOL: f64 = 1e-10;

fn check_dim(h: &DenseSymMatrix) -> Result<()> {
    if h.dim() > MAX_EVOLUTION_DIM {
        return Err(Error::InvalidParameter(format!(
            "evolution limited to n <= {MAX_EVOLUTION_DIM}, got {}",
            h.dim()
        )));
    }
    Ok(())
}

fn unitary_from_eig(eig: &SymEig, t: f64) -> DMatrix<Complex64> {
    let n = eig.values.len();
    let v = eig.vectors.map(|x| Complex64::new(x, 0.0));
    let mut vd = v.clone();
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, -eig.values[k] * t);
        for z in vd.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    vd * v.transpose()
}

/// `U = V e^{−iΛt} Vᵀ`.
pub fn evolve(h: &DenseSymMatrix, t: f64) -> Result<DMatrix<Complex64>> {
    check_dim(h)?;
    Ok(unitary_from_eig(&SymEig::new(h)?, t))
}

/// `‖U†U − I‖₂`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    complex_spectral_norm(&(u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)))
}

/// `‖HH̃ − H̃H‖₂`.
pub fn commutator_norm(h: &DenseSymMatrix, ht: &DenseSymMatrix) -> Result<f64> {
    if h.dim() != ht.dim() {
        return Err(Error::DimensionMismatch(h.dim(), ht.dim()));
    }
    let a = h.as_matrix();
    let b = ht.as_matrix();
    Ok(spectral_norm(&(a * b - b * a)))
}

/// `√ε / (t‖H‖)` scaled by `constant`.
pub fn eps_prime_budget(epsilon: f64, t: f64, norm_h: f64, constant: f64) -> f64 {
    constant * epsilon.sqrt() / (t * norm_h)
}

/// `m t ‖H‖ ln n / ε` with unit constant.
pub fn classical_overhead(m: usize, t: f64, norm_h: f64, n: f64, epsilon: f64) -> f64 {
    m as f64 * t * norm_h * n.ln() / epsilon
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionErrorReport {
    pub t: f64,
    pub spectral_norm_h: f64,
    /// `‖H̃ − H‖₂ / ‖H‖₂`.
    pub eps_prime: f64,
    pub diff_norm: f64,
    pub sq_diff: f64,
    pub sq_bound_first_order: f64,
    pub commutator_norm: f64,
    pub commuting: bool,
    /// Largest `‖(Ũ − U)v‖²` over eigenvectors `v` of `H`.
    pub worst_state_sq: f64,
}

/// Eigendata for a fixed `(H, H̃)` pair, evaluated at many times.
#[derive(Debug, Clone)]
pub struct EvolutionPair {
    h: SymEig,
    ht: SymEig,
    norm_h: f64,
    eps_prime: f64,
    commutator: f64,
    commuting: bool,
}

impl EvolutionPair {
    pub fn new(h: &DenseSymMatrix, ht: &DenseSymMatrix) -> Result<Self> {
        if h.dim() != ht.dim() {
            return Err(Error::DimensionMismatch(h.dim(), ht.dim()));
        }
        check_dim(h)?;
        let he = SymEig::new(h)?;
        let hte = SymEig::new(ht)?;
        let norm_h = he.spectral_norm();
        let norm_ht = hte.spectral_norm();
        let delta = SymEig::new(&ht.sub(h))?.spectral_norm();
        let eps_prime = if norm_h > 0.0 { delta / norm_h } else if delta == 0.0 { 0.0 } else { f64::INFINITY };
        let commutator = commutator_norm(h, ht)?;
        Ok(Self {
            commuting: commutator <= COMMUTE_RTOL * norm_h * norm_ht,
            h: he,
            ht: hte,
            norm_h,
            eps_prime,
            commutator,
        })
    }

    pub fn norm_h(&self) -> f64 {
        self.norm_h
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    pub fn at(&self, t: f64) -> EvolutionErrorReport {
        let diff = unitary_from_eig(&self.ht, t) - unitary_from_eig(&self.h, t);
        let diff_norm = complex_spectral_norm(&diff);
        let v = self.h.vectors.map(|x| Complex64::new(x, 0.0));
        let per_state = &diff * v;
        let worst_state_sq = per_state
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        EvolutionErrorReport {
            t,
            spectral_norm_h: self.norm_h,
            eps_prime: self.eps_prime,
            diff_norm,
            sq_diff: diff_norm * diff_norm,
            sq_bound_first_order: (self.eps_prime * t * self.norm_h).powi(2),
            commutator_norm: self.commutator,
            commuting: self.commuting,
            worst_state_sq,
        }
    }

    pub fn sweep(&self, times: &[f64], exec: Execution) -> Vec<EvolutionErrorReport> {
        exec.map(times.to_vec(), |t| self.at(t))
    }
}

pub fn evolution_diff(h: &DenseSymMatrix, ht: &DenseSymMatrix, t: f64) -> Result<EvolutionErrorReport> {
    Ok(EvolutionPair::new(h, ht)?.at(t))
}

pub fn sweep_csv(rows: &[EvolutionErrorReport]) -> String {
    let mut s = String::from("t,diff_norm,sq_bound,commuting\n");
    for r in rows {
        s.push_str(&format!("{:?},{:?},{:?},{}\n", r.t, r.diff_norm, r.sq_bound_first_order, r.commuting));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, data: &[f64]) -> DenseSymMatrix {
        DenseSymMatrix::from_matrix(DMatrix::from_row_slice(n, n, data)).unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let u = evolve(&sym(3, &[0.0; 9]), 2.0).unwrap();
        assert!(complex_spectral_norm(&(u - DMatrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn diagonal_hamiltonian() {
        let h = DenseSymMatrix::from_diagonal(&[0.5, -1.0, 3.0]);
        let t = 0.7;
        let u = evolve(&h, t).unwrap();
        for (k, l) in [0.5f64, -1.0, 3.0].iter().enumerate() {
            let want = Complex64::from_polar(1.0, -l * t);
            assert!((u[(k, k)] - want).norm() < 1e-14);
        }
        assert!(unitarity_defect(&u) < 1e-10);
    }

    #[test]
    fn scalar_hamiltonian() {
        let u = evolve(&sym(1, &[2.5]), 1.3).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -2.5 * 1.3)).norm() < 1e-15);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_pair_has_zero_error() {
        let h = sym(2, &[1.0, 0.3, 0.3, -0.5]);
        let r = evolution_diff(&h, &h, 3.0).unwrap();
        assert_eq!(r.diff_norm, 0.0);
        assert!(r.commuting);
    }

    #[test]
    fn scalar_closed_form() {
        let (eps, t) = (0.1, 1.0);
        let h = sym(1, &[1.0]);
        let r = evolution_diff(&h, &h.scale(1.0 + eps), t).unwrap();
        let closed = 2.0 * (eps * t / 2.0f64).sin().abs();
        assert!((r.diff_norm - closed).abs() < 1e-12);
        assert!((r.diff_norm - 0.0999583).abs() < 1e-7);
    }

    #[test]
    fn diagonal_pair_within_bound() {
        let (eps, t) = (0.05, 1.0);
        let h = DenseSymMatrix::from_diagonal(&[1.0, 2.0]);
        let r = evolution_diff(&h, &h.scale(1.0 + eps), t).unwrap();
        assert!((r.diff_norm - 2.0 * 0.05f64.sin()).abs() < 1e-12);
        assert!((r.sq_bound_first_order - 0.01).abs() < 1e-15);
        assert!(r.sq_diff <= r.sq_bound_first_order);
        assert!((r.worst_state_sq - r.sq_diff).abs() < 1e-12);
    }

    #[test]
    fn budget_and_overhead() {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(eps_prime_budget(0.01, 1.0, 10.0, 1.0), 0.01) < 1e-12);
        assert!(rel(eps_prime_budget(1.0, 1.0, 1.0, 1.0), 1.0) < 1e-12);
        assert!(rel(eps_prime_budget(0.04, 2.0, 5.0, 1.0), 0.02) < 1e-12);
        assert!(rel(classical_overhead(100, 1.0, 1.0, std::f64::consts::E, 1.0), 100.0) < 1e-12);
        let base = classical_overhead(1000, 1.5, 3.0, 64.0, 0.2);
        assert!(rel(classical_overhead(1000, 3.0, 3.0, 64.0, 0.2), 2.0 * base) < 1e-12);
        let big = classical_overhead(10_000, 10.0, 100.0, 1024.0, 0.1);
        assert!(rel(big, 1e4 * 10.0 * 100.0 * 1024f64.ln() / 0.1) < 1e-12);
        assert!((big - 6.93e8).abs() / 6.93e8 < 1e-3);
    }

    #[test]
    fn commutators() {
        let h = sym(2, &[0.0, 1.0, 1.0, 0.0]);
        let z = DenseSymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!((commutator_norm(&h, &z).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(commutator_norm(&h, &h.scale(3.0)).unwrap(), 0.0);
        let g = sym(3, &[1.0, 0.4, 0.0, 0.4, -2.0, 0.7, 0.0, 0.7, 0.5]);
        let gm = g.as_matrix();
        let poly = DenseSymMatrix::from_matrix(gm * gm * 2.0 - gm * 0.5 + DMatrix::identity(3, 3)).unwrap();
        let bound = COMMUTE_RTOL * SymEig::new(&g).unwrap().spectral_norm() * SymEig::new(&poly).unwrap().spectral_norm();
        assert!(commutator_norm(&g, &poly).unwrap() <= bound);
    }

    #[test]
    fn oversized_rejected() {
        let h = DenseSymMatrix::identity(MAX_EVOLUTION_DIM + 1);
        assert!(evolve(&h, 1.0).is_err());
    }

    #[test]
    fn csv_format() {
        let h = DenseSymMatrix::from_diagonal(&[1.0]);
        let pair = EvolutionPair::new(&h, &h.scale(1.1)).unwrap();
        let rows = pair.sweep(&[0.5, 1.0], Execution::Sequential);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("t,diff_norm,sq_bound,commuting\n0.5,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
