use nalgebra::DMatrix;

use super::fixed::FixedCodec;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Matrix entries as seen through `U_A |i⟩|j⟩|z⟩ = |i⟩|j⟩|z ⊕ A_ij⟩`:
/// entries are divided by `Λ` and stored as fixed-point codes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMatrix {
    n: usize,
    index_bits: u32,
    codec: FixedCodec,
    lambda: f64,
    codes: Vec<u64>,
}

impl OracleMatrix {
    /// `lambda` defaults to `max |A_ij|` (or 1 for the zero matrix).
    pub fn from_dense(a: &DMatrix<f64>, frac_bits: u32, lambda: Option<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(n, a.ncols()));
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let max_abs = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lambda = lambda.unwrap_or(if max_abs > 0.0 { max_abs } else { 1.0 });
        if !(lambda > 0.0 && lambda >= max_abs) {
            return Err(Error::InvalidParameter(format!("normalization {lambda} below max entry {max_abs}")));
        }
        let codec = FixedCodec::new(frac_bits)?;
        let mut codes = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                codes.push(codec.encode(a[(i, j)] / lambda)?);
            }
        }
        Ok(Self { n, index_bits: n.trailing_zeros(), codec, lambda, codes })
    }

    /// Adjacency matrix of `g`, zero-padded to the next power of two.
    pub fn from_graph(g: &WeightedGraph, frac_bits: u32) -> Result<Self> {
        let n = g.n().next_power_of_two();
        let mut a = DMatrix::zeros(n, n);
        for e in g.edges() {
            a[(e.u, e.v)] = e.w;
            a[(e.v, e.u)] = e.w;
        }
        Self::from_dense(&a, frac_bits, None)
    }

    /// Comma- or whitespace-separated rows; `#` lines skipped.
    pub fn parse_csv(text: &str) -> Result<DMatrix<f64>> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let row = t
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
            rows.push(row);
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Parse { line: bad + 1, msg: format!("expected {n} columns") });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    pub fn codec(&self) -> FixedCodec {
        self.codec
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn code(&self, i: usize, j: usize) -> u64 {
        self.codes[i * self.n + j]
    }

    /// Normalized entry `A_ij / Λ` after quantization.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.codec.decode(self.code(i, j))
    }

    /// Threshold magnitude in code units; `delta` is post-normalization.
    pub fn delta_code(&self, delta: f64) -> Result<u64> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
        }
        if delta > 1.0 {
            // Above every representable magnitude.
            return Ok((1 << self.codec.frac_bits()) + 1);
        }
        self.codec.encode(delta)
    }

    /// `|{j : |A_ij| ≥ δ}|` by direct scan.
    pub fn classical_support(&self, i: usize, delta: f64) -> Result<usize> {
        let d = self.delta_code(delta)?;
        Ok((0..self.n).filter(|&j| self.codec.magnitude(self.code(i, j)) >= d).count())
    }

    /// Row sums in `2^-p` units, by direct scan.
    pub fn classical_row_sums(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.codec.to_units(self.code(i, j))).sum())
            .collect()
    }

    /// Converts a sum in code units back to the caller's scale.
    pub fn units_to_value(&self, units: i64) -> f64 {
        units as f64 / self.codec.scale() * self.lambda
    }
}
