//! Row-support counting by amplitude estimation.
//!
//! For row `i`, the preparation `A = comp · U_A · H_col` maps the initial
//! state `|0⟩_col |0⟩_data |δ⟩_ref |0⟩_flag` to
//! `n^{-1/2} Σ_j |j⟩|A_ij⟩|δ⟩|[|A_ij| ≥ δ]⟩`, whose flag-1 component has
//! norm `√(s(i)/n)`. Amplitude estimation runs phase estimation on the
//! Grover iterate `Q = A (2|0⟩⟨0| − I) A† S_flag`; the outcome `y` of an
//! `m`-qubit counting register gives `ŝ = n sin²(πy/2^m)`.
//!
//! The iterate is simulated gate by gate on a sparse statevector. The
//! counting-register outcome distribution is then computed exactly from the
//! iterate's autocorrelation `c_d = ⟨φ₀|Q^d|φ₀⟩`:
//! `P(y) = M⁻²[M + 2 Σ_{d≥1} (M − d) c_d cos(2π d y / M)]`, `M = 2^m`.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::Serialize;

use super::ledger::QueryLedger;
use super::oracle::OracleMatrix;
use super::state::{Field, Layout, SparseState};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::sparsifier::rng_from_seed;

pub const DEFAULT_CAP_QUBITS: u32 = 32;

/// Sampled registers and gates for one row.
#[derive(Debug, Clone)]
pub struct RowFlagCircuit<'a> {
    matrix: &'a OracleMatrix,
    row: usize,
    col: Field,
    data: Field,
    reference: Field,
    flag: Field,
    delta: u64,
    init: u64,
}

impl<'a> RowFlagCircuit<'a> {
    pub fn new(matrix: &'a OracleMatrix, row: usize, delta: f64) -> Result<Self> {
        if row >= matrix.n() {
            return Err(Error::RowOutOfRange { row, n: matrix.n() });
        }
        let w = matrix.codec().width();
        let mut layout = Layout::new();
        let col = layout.field(matrix.index_bits())?;
        let data = layout.field(w)?;
        let reference = layout.field(w)?;
        let flag = layout.field(1)?;
        let delta = matrix.delta_code(delta)?;
        let init = reference.set(0, delta);
        Ok(Self { matrix, row, col, data, reference, flag, delta, init })
    }

    /// Simulated register budget: column, data and flag qubits.
    pub fn work_qubits(&self) -> u32 {
        self.col.width + self.data.width + self.flag.width
    }

    pub fn initial_state(&self) -> SparseState {
        SparseState::basis(self.init)
    }

    fn oracle(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_oracle(1);
        let (m, i, col, data) = (self.matrix, self.row, self.col, self.data);
        state.permute(|k| Ok(data.set(k, data.get(k) ^ m.code(i, col.get(k) as usize))))?;
        state.check_normalized()
    }

    fn comparator(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_comparator(1);
        let codec = self.matrix.codec();
        let (data, reference, flag) = (self.data, self.reference, self.flag);
        state.permute(|k| {
            let ge = codec.magnitude(data.get(k)) >= codec.magnitude(reference.get(k));
            Ok(if ge { flag.set(k, flag.get(k) ^ 1) } else { k })
        })?;
        state.check_normalized()
    }

    pub fn prepare(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_preparation(1);
        state.hadamard(self.col)?;
        self.oracle(state, ledger)?;
        self.comparator(state, ledger)
    }

    pub fn unprepare(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_preparation(1);
        self.comparator(state, ledger)?;
        self.oracle(state, ledger)?;
        state.hadamard(self.col)
    }

    pub fn grover_iterate(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        let flag = self.flag;
        state.phase_flip(|k| flag.get(k) == 1);
        self.unprepare(state, ledger)?;
        state.reflect_about(self.init);
        self.prepare(state, ledger)
    }

    pub fn flagged_probability(&self, state: &SparseState) -> f64 {
        let flag = self.flag;
        state.probability(|k| flag.get(k) == 1)
    }

    pub fn delta_code(&self) -> u64 {
        self.delta
    }
}

/// `‖Π₁ A|0⟩‖ = √(s(i)/n)`.
pub fn row_amplitude(matrix: &OracleMatrix, row: usize, delta: f64, ledger: &mut QueryLedger) -> Result<f64> {
    let c = RowFlagCircuit::new(matrix, row, delta)?;
    let mut s = c.initial_state();
    c.prepare(&mut s, ledger)?;
    Ok(c.flagged_probability(&s).sqrt())
}

/// Exact outcome distribution of an `m`-qubit counting register.
pub fn ae_outcome_distribution(
    matrix: &OracleMatrix,
    row: usize,
    delta: f64,
    counting_qubits: u32,
    ledger: &mut QueryLedger,
) -> Result<Vec<f64>> {
    if counting_qubits == 0 || counting_qubits > 20 {
        return Err(Error::InvalidParameter(format!("counting qubits must be in 1..=20, got {counting_qubits}")));
    }
    let c = RowFlagCircuit::new(matrix, row, delta)?;
    let big_m = 1usize << counting_qubits;
    let mut phi0 = c.initial_state();
    c.prepare(&mut phi0, ledger)?;
    let mut corr = Vec::with_capacity(big_m);
    corr.push(1.0);
    let mut phi = phi0.clone();
    for _ in 1..big_m {
        c.grover_iterate(&mut phi, ledger)?;
        corr.push(phi0.inner(&phi));
    }
    let mf = big_m as f64;
    let probs: Vec<f64> = (0..big_m)
        .map(|y| {
            let mut acc = mf;
            for (d, cd) in corr.iter().enumerate().skip(1) {
                acc += 2.0 * (mf - d as f64) * cd * (2.0 * PI * (d * y) as f64 / mf).cos();
            }
            (acc / (mf * mf)).max(0.0)
        })
        .collect();
    Ok(probs)
}

/// `ŝ = n sin²(πy/2^m)`.
pub fn support_from_outcome(n: usize, y: usize, counting_qubits: u32) -> f64 {
    let theta = PI * y as f64 / (1u64 << counting_qubits) as f64;
    n as f64 * theta.sin().powi(2)
}

/// Standard additive amplitude-estimation error, scaled to support counts:
/// `n (2π√(a(1−a))/M + π²/M²)` with `a = s/n`.
pub fn ae_support_tolerance(n: usize, s: usize, counting_qubits: u32) -> f64 {
    let a = s as f64 / n as f64;
    let m = (1u64 << counting_qubits) as f64;
    n as f64 * (2.0 * PI * (a * (1.0 - a)).sqrt() / m + PI * PI / (m * m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AeEstimate {
    pub row: usize,
    pub outcome: usize,
    pub estimate: f64,
    pub counting_qubits: u32,
    pub ledger: QueryLedger,
}

fn check_cap(work_qubits: u32, counting_qubits: u32, cap: u32) -> Result<()> {
    let needed = work_qubits + counting_qubits;
    if needed > cap {
        return Err(Error::RegisterCap { needed, cap });
    }
    Ok(())
}

pub fn estimate_row_sparsity_ae(
    matrix: &OracleMatrix,
    row: usize,
    delta: f64,
    counting_qubits: u32,
    cap_qubits: u32,
    seed: u64,
) -> Result<AeEstimate> {
    let c = RowFlagCircuit::new(matrix, row, delta)?;
    check_cap(c.work_qubits(), counting_qubits, cap_qubits)?;
    let mut ledger = QueryLedger::new();
    let probs = ae_outcome_distribution(matrix, row, delta, counting_qubits, &mut ledger)?;
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::Numeric(format!("outcome distribution: {e}")))?;
    let outcome = dist.sample(&mut rng_from_seed(seed));
    Ok(AeEstimate {
        row,
        outcome,
        estimate: support_from_outcome(matrix.n(), outcome, counting_qubits),
        counting_qubits,
        ledger,
    })
}

/// `⌈log₂(√n/ε)⌉ + 2`, at least 1.
pub fn scan_counting_qubits(n: usize, eps: f64) -> u32 {
    let m = ((n as f64).sqrt() / eps).log2().ceil() + 2.0;
    m.max(1.0) as u32
}

/// Per-row ledger of one estimate: the initial preparation plus `2^m − 1`
/// Grover iterates, each with one forward and one inverse preparation.
pub fn analytic_row_ledger(counting_qubits: u32) -> QueryLedger {
    let calls = 2 * ((1u64 << counting_qubits) - 1) + 1;
    QueryLedger::from_counts(calls, calls, 0, calls)
}

pub fn analytic_scan_ledger(n: usize, eps: f64) -> QueryLedger {
    let row = analytic_row_ledger(scan_counting_qubits(n, eps));
    (0..n).map(|_| row).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub delta: f64,
    pub eps: f64,
    pub counting_qubits: u32,
    pub per_row_estimates: Vec<f64>,
    pub per_row_outcomes: Vec<usize>,
    pub max_estimate: f64,
    pub threshold: f64,
    pub verdict: &'static str,
    pub ledger: QueryLedger,
    /// `oracle_calls / (n^{3/2}/ε)`.
    pub ledger_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub delta: f64,
    pub eps: f64,
    /// Overrides `scan_counting_qubits` when set.
    pub counting_qubits: Option<u32>,
    pub cap_qubits: u32,
    /// Rows with estimated support above this fail the verdict.
    pub threshold: f64,
    pub seed: u64,
}

/// Estimates every row's support; row `i` samples with seed `seed + i`.
pub fn full_sparsity_scan(matrix: &OracleMatrix, cfg: &ScanConfig, exec: Execution) -> Result<ScanReport> {
    if !(cfg.eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be > 0, got {}", cfg.eps)));
    }
    let n = matrix.n();
    let m = cfg.counting_qubits.unwrap_or_else(|| scan_counting_qubits(n, cfg.eps));
    let rows = exec.map_range(n, |i| {
        estimate_row_sparsity_ae(matrix, i, cfg.delta, m, cfg.cap_qubits, cfg.seed.wrapping_add(i as u64))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ledger: QueryLedger = rows.iter().map(|r| r.ledger).sum();
    let per_row_estimates: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
    let max_estimate = per_row_estimates.iter().copied().fold(0.0, f64::max);
    let scale = (n as f64).powf(1.5) / cfg.eps;
    Ok(ScanReport {
        n,
        delta: cfg.delta,
        eps: cfg.eps,
        counting_qubits: m,
        per_row_outcomes: rows.iter().map(|r| r.outcome).collect(),
        per_row_estimates,
        max_estimate,
        threshold: cfg.threshold,
        verdict: if max_estimate <= cfg.threshold { "row sparse" } else { "not row sparse" },
        ledger_constant: ledger.oracle_calls() as f64 / scale,
        ledger,
    })
}
