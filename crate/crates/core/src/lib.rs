//! Spectral sparsification by effective-resistance sampling, with spectral
//! and row-sparsity certificates, Hamiltonian-evolution error measurement and
//! simulated quantum row-sparsity testers.

pub mod cert;
pub mod error;
pub mod generators;
pub mod graph;
pub mod hamsim;
pub mod linalg;
pub mod par;
pub mod pipeline;
pub mod qsim;
pub mod resistance;
pub mod rowsparsity;
pub mod sparsifier;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use par::Execution;
