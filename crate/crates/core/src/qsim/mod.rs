//! Statevector simulation of quantum row-sparsity testers.

pub mod ae;
pub mod fixed;
pub mod ledger;
pub mod maxfind;
pub mod oracle;
pub mod state;

pub use ae::{estimate_row_sparsity_ae, full_sparsity_scan, row_amplitude, AeEstimate, ScanConfig, ScanReport};
pub use fixed::FixedCodec;
pub use ledger::QueryLedger;
pub use maxfind::{accumulate_row_sums, find_max_row_sum, MaxRowSum};
pub use oracle::OracleMatrix;
