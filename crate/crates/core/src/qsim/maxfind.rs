//! Row-sum superposition and maximum finding over it.
//!
//! The preparation loads each column of a row into a data register, adds it
//! into a running sum and uncomputes the load, giving
//! `n^{-1/2} Σ_i |i⟩|0⟩_col|0⟩_data|Σ_k A_ik⟩_sum`. Maximum finding runs
//! Dürr–Høyer threshold iteration on top, with exponential Grover search
//! (random iteration counts, growth factor 6/5) for a branch above the
//! current threshold.

use rand::Rng;
use serde::Serialize;

use super::ledger::QueryLedger;
use super::oracle::OracleMatrix;
use super::state::{Field, Layout, SparseState};
use crate::error::{Error, Result};
use crate::sparsifier::rng_from_seed;

const GROWTH: f64 = 6.0 / 5.0;

/// Register layout for the row-sum preparation.
#[derive(Debug, Clone)]
pub struct RowSumCircuit<'a> {
    matrix: &'a OracleMatrix,
    row: Field,
    col: Field,
    data: Field,
    sum: Field,
}

fn twos_to_i64(v: u64, width: u32) -> i64 {
    let shift = 64 - width;
    ((v << shift) as i64) >> shift
}

fn i64_to_twos(v: i64, width: u32) -> u64 {
    (v as u64) & if width == 64 { u64::MAX } else { (1u64 << width) - 1 }
}

impl<'a> RowSumCircuit<'a> {
    /// The sum register has `p + k + 2` bits (two's complement), enough for
    /// `|Σ_k A_ik| ≤ n·Λ`.
    pub fn new(matrix: &'a OracleMatrix) -> Result<Self> {
        let k = matrix.index_bits();
        let codec = matrix.codec();
        let mut layout = Layout::new();
        let row = layout.field(k)?;
        let col = layout.field(k)?;
        let data = layout.field(codec.width())?;
        let sum = layout.field(codec.frac_bits() + k + 2)?;
        Ok(Self { matrix, row, col, data, sum })
    }

    pub fn sum_width(&self) -> u32 {
        self.sum.width
    }

    fn sum_limits(&self) -> (i64, i64) {
        let half = 1i64 << (self.sum.width - 1);
        (-half, half - 1)
    }

    fn oracle(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_oracle(1);
        let (m, row, col, data) = (self.matrix, self.row, self.col, self.data);
        state.permute(|key| {
            let code = m.code(row.get(key) as usize, col.get(key) as usize);
            Ok(data.set(key, data.get(key) ^ code))
        })?;
        state.check_normalized()
    }

    fn adder(&self, state: &mut SparseState, ledger: &mut QueryLedger, sign: i64) -> Result<()> {
        ledger.record_adder(1);
        let codec = self.matrix.codec();
        let (data, sum) = (self.data, self.sum);
        let (lo, hi) = self.sum_limits();
        let w = sum.width;
        state.permute(|key| {
            let next = twos_to_i64(sum.get(key), w) + sign * codec.to_units(data.get(key));
            if next < lo || next > hi {
                return Err(Error::RegisterOverflow(format!("row sum {next} outside [{lo}, {hi}]")));
            }
            Ok(sum.set(key, i64_to_twos(next, w)))
        })?;
        state.check_normalized()
    }

    fn shift_col(&self, state: &mut SparseState, by: u64) -> Result<()> {
        let col = self.col;
        let mask = col.size() - 1;
        state.permute(|key| Ok(col.set(key, col.get(key).wrapping_add(by) & mask)))
    }

    /// Hadamard on the row register, then for each column: load, add,
    /// unload, increment. The column register wraps back to 0.
    pub fn prepare(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_preparation(1);
        state.hadamard(self.row)?;
        for _ in 0..self.matrix.n() {
            self.oracle(state, ledger)?;
            self.adder(state, ledger, 1)?;
            self.oracle(state, ledger)?;
            self.shift_col(state, 1)?;
        }
        Ok(())
    }

    pub fn unprepare(&self, state: &mut SparseState, ledger: &mut QueryLedger) -> Result<()> {
        ledger.record_preparation(1);
        for _ in 0..self.matrix.n() {
            self.shift_col(state, u64::MAX)?;
            self.oracle(state, ledger)?;
            self.adder(state, ledger, -1)?;
            self.oracle(state, ledger)?;
        }
        state.hadamard(self.row)
    }

    /// Phase flip on branches whose sum exceeds `threshold` (code units).
    fn mark_above(&self, state: &mut SparseState, ledger: &mut QueryLedger, threshold: i64) {
        ledger.record_comparator(1);
        let (sum, w) = (self.sum, self.sum.width);
        state.phase_flip(|key| twos_to_i64(sum.get(key), w) > threshold);
    }

    pub fn grover_iterate(&self, state: &mut SparseState, ledger: &mut QueryLedger, threshold: i64) -> Result<()> {
        self.mark_above(state, ledger, threshold);
        self.unprepare(state, ledger)?;
        state.reflect_about(0);
        self.prepare(state, ledger)
    }

    /// `(row, sum in code units)` for every branch of a prepared state.
    pub fn branches(&self, state: &SparseState) -> Vec<(usize, i64)> {
        state.iter().map(|(key, _)| self.decode(key)).collect()
    }

    fn decode(&self, key: u64) -> (usize, i64) {
        (self.row.get(key) as usize, twos_to_i64(self.sum.get(key), self.sum.width))
    }
}

#[derive(Debug, Clone)]
pub struct RowSumState {
    pub state: SparseState,
    /// `(row, sum)` per branch, sums in code units.
    pub branches: Vec<(usize, i64)>,
    pub ledger: QueryLedger,
}

pub fn accumulate_row_sums(matrix: &OracleMatrix) -> Result<RowSumState> {
    let c = RowSumCircuit::new(matrix)?;
    let mut state = SparseState::basis(0);
    let mut ledger = QueryLedger::new();
    c.prepare(&mut state, &mut ledger)?;
    Ok(RowSumState { branches: c.branches(&state), state, ledger })
}

/// `⌈22.5√n + 1.4 log₂² n⌉` Grover iterations in total.
pub fn max_finding_budget(n: usize) -> u64 {
    let nf = n as f64;
    (22.5 * nf.sqrt() + 1.4 * nf.log2().powi(2)).ceil() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxRowSum {
    pub max_units: i64,
    /// `max_units` rescaled by `2^-p·Λ`.
    pub max_sum: f64,
    pub argmax: usize,
    pub threshold_updates: u32,
    pub search_attempts: u32,
    pub grover_iterations: u64,
    pub budget: u64,
    pub ledger: QueryLedger,
}

pub fn find_max_row_sum(matrix: &OracleMatrix, seed: u64) -> Result<MaxRowSum> {
    let c = RowSumCircuit::new(matrix)?;
    let n = matrix.n();
    let mut rng = rng_from_seed(seed);
    let mut ledger = QueryLedger::new();
    let budget = max_finding_budget(n);
    let root_n = (n as f64).sqrt();

    // Initial threshold from one measurement of the prepared state.
    let mut state = SparseState::basis(0);
    c.prepare(&mut state, &mut ledger)?;
    let (mut argmax, mut best) = c.decode(state.measure(&mut rng));
    let mut spent = 1u64;
    let (mut updates, mut attempts) = (0u32, 0u32);
    let mut m = 1.0f64;

    while spent < budget {
        let j = rng.random_range(0..m.floor().max(1.0) as u64);
        let mut s = SparseState::basis(0);
        c.prepare(&mut s, &mut ledger)?;
        for _ in 0..j {
            c.grover_iterate(&mut s, &mut ledger, best)?;
        }
        spent += j + 1;
        attempts += 1;
        let (row, sum) = c.decode(s.measure(&mut rng));
        if sum > best {
            best = sum;
            argmax = row;
            updates += 1;
            m = 1.0;
        } else {
            m = (GROWTH * m).min(root_n);
        }
    }

    Ok(MaxRowSum {
        max_units: best,
        max_sum: matrix.units_to_value(best),
        argmax,
        threshold_updates: updates,
        search_attempts: attempts,
        grover_iterations: spent,
        budget,
        ledger,
    })
}
