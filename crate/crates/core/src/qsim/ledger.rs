use std::ops::{Add, AddAssign};

use serde::Serialize;

/// Counts of primitive invocations. Counters only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    oracle_calls: u64,
    comparator_calls: u64,
    adder_calls: u64,
    state_preparations: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls
    }

    pub fn comparator_calls(&self) -> u64 {
        self.comparator_calls
    }

    pub fn adder_calls(&self) -> u64 {
        self.adder_calls
    }

    pub fn state_preparations(&self) -> u64 {
        self.state_preparations
    }

    pub fn record_oracle(&mut self, k: u64) {
        self.oracle_calls += k;
    }

    pub fn record_comparator(&mut self, k: u64) {
        self.comparator_calls += k;
    }

    pub fn record_adder(&mut self, k: u64) {
        self.adder_calls += k;
    }

    pub fn record_preparation(&mut self, k: u64) {
        self.state_preparations += k;
    }

    /// Ledger with the given totals; used by the closed-form cost formulas.
    pub fn from_counts(oracle: u64, comparator: u64, adder: u64, preparations: u64) -> Self {
        Self { oracle_calls: oracle, comparator_calls: comparator, adder_calls: adder, state_preparations: preparations }
    }
}

impl AddAssign for QueryLedger {
    fn add_assign(&mut self, o: Self) {
        self.oracle_calls += o.oracle_calls;
        self.comparator_calls += o.comparator_calls;
        self.adder_calls += o.adder_calls;
        self.state_preparations += o.state_preparations;
    }
}

impl Add for QueryLedger {
    type Output = Self;

    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl std::iter::Sum for QueryLedger {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}
