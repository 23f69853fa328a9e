//! i.i.d. edge sampling with replacement, reweighted so that the sampled
//! Laplacian is an unbiased estimate of the original.
//!
//! Each of the `q` draws picks edge `e` with probability `p_e` and adds
//! `w_e / (q p_e)` to it. Draws use Walker's alias table over a
//! `ChaCha8Rng` seeded from the 64-bit seed, so output is a pure function of
//! `(graph, pmf, q, seed)`.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::resistance::ResistanceTable;

/// Name of the generator behind every seeded draw in this crate.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub const DEFAULT_OVERSAMPLE: f64 = 4.0;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifyConfig {
    pub epsilon: f64,
    pub oversample_c: f64,
    /// Overrides the default `⌈C n ln n / ε²⌉` when set.
    pub sample_count: Option<u64>,
    pub seed: u64,
    /// Overrides the effective-resistance pmf when set.
    pub pmf: Option<Vec<f64>>,
}

impl SparsifyConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self { epsilon, oversample_c: DEFAULT_OVERSAMPLE, sample_count: None, seed, pmf: None }
    }

    pub fn with_samples(mut self, q: u64) -> Self {
        self.sample_count = Some(q);
        self
    }

    pub fn with_oversample(mut self, c: f64) -> Self {
        self.oversample_c = c;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn resolved_samples(&self, n: usize) -> u64 {
        self.sample_count
            .unwrap_or_else(|| expected_samples_default(n.max(2), self.epsilon, self.oversample_c))
    }
}

/// `⌈C n ln n / ε²⌉`.
pub fn expected_samples_default(n: usize, epsilon: f64, oversample_c: f64) -> u64 {
    let n = n as f64;
    (oversample_c * n * n.ln() / (epsilon * epsilon)).ceil() as u64
}

/// Exponent `a` with `q = n (ln n)^a`; `None` when `n < 3`.
pub fn implied_log_exponent(q: u64, n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    let n = n as f64;
    Some((q as f64 / n).ln() / n.ln().ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifierOutput {
    pub graph: WeightedGraph,
    /// Draw count per original edge.
    pub edge_tally: Vec<u64>,
    /// Draws incident to each vertex; sums to `2q`.
    pub vertex_tally: Vec<u64>,
    pub q_used: u64,
    pub seed: u64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SparsifierSidecar<'a> {
    pub q: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub implied_a: Option<f64>,
    pub rng: &'static str,
    pub edge_tallies: &'a [u64],
    pub vertex_tallies: &'a [u64],
}

impl SparsifierOutput {
    pub fn sidecar(&self) -> SparsifierSidecar<'_> {
        SparsifierSidecar {
            q: self.q_used,
            seed: self.seed,
            epsilon: self.epsilon,
            implied_a: implied_log_exponent(self.q_used, self.graph.n()),
            rng: RNG_NAME,
            edge_tallies: &self.edge_tally,
            vertex_tallies: &self.vertex_tally,
        }
    }

    pub fn max_vertex_tally(&self) -> u64 {
        self.vertex_tally.iter().copied().max().unwrap_or(0)
    }
}

/// A reusable alias table for repeated sampling from one graph.
#[derive(Debug, Clone)]
pub struct EdgeSampler<'g> {
    graph: &'g WeightedGraph,
    pmf: Vec<f64>,
    table: WeightedAliasIndex<f64>,
}

impl<'g> EdgeSampler<'g> {
    pub fn new(graph: &'g WeightedGraph, pmf: &[f64]) -> Result<Self> {
        if graph.m() == 0 {
            return Err(Error::NoEdges);
        }
        if pmf.len() != graph.m() {
            return Err(Error::DimensionMismatch(pmf.len(), graph.m()));
        }
        if let Some((edge, &value)) = pmf.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::NonPositivePmf { edge, value });
        }
        let total: f64 = pmf.iter().sum();
        let pmf: Vec<f64> = pmf.iter().map(|p| p / total).collect();
        let table = WeightedAliasIndex::new(pmf.clone())
            .map_err(|e| Error::InvalidParameter(format!("alias table: {e}")))?;
        Ok(Self { graph, pmf, table })
    }

    pub fn from_resistances(graph: &'g WeightedGraph, tbl: &ResistanceTable) -> Result<Self> {
        Self::new(graph, &tbl.edge_prob)
    }

    /// Draw counts per edge only; the cheap inner loop of Monte-Carlo runs.
    pub fn tally(&self, q: u64, seed: u64) -> Vec<u64> {
        let mut rng = rng_from_seed(seed);
        let mut tally = vec![0u64; self.graph.m()];
        for _ in 0..q {
            tally[self.table.sample(&mut rng)] += 1;
        }
        tally
    }

    pub fn vertex_tally(&self, edge_tally: &[u64]) -> Vec<u64> {
        let mut x = vec![0u64; self.graph.n()];
        for (e, &t) in self.graph.edges().iter().zip(edge_tally) {
            x[e.u] += t;
            x[e.v] += t;
        }
        x
    }

    /// Collapsed weight per original edge: `tally_e · w_e / (q p_e)`.
    pub fn weights(&self, edge_tally: &[u64], q: u64) -> Vec<f64> {
        self.graph
            .edges()
            .iter()
            .zip(edge_tally)
            .zip(&self.pmf)
            .map(|((e, &t), p)| t as f64 * e.w / (q as f64 * p))
            .collect()
    }

    pub fn sample(&self, q: u64, seed: u64, epsilon: f64) -> Result<SparsifierOutput> {
        if q == 0 {
            return Err(Error::InvalidParameter("sample count q must be at least 1".into()));
        }
        let edge_tally = self.tally(q, seed);
        let weights = self.weights(&edge_tally, q);
        let kept = self
            .graph
            .edges()
            .iter()
            .zip(&edge_tally)
            .zip(&weights)
            .filter(|((_, &t), _)| t > 0)
            .map(|((e, _), &w)| (e.u, e.v, w));
        let graph = WeightedGraph::new(self.graph.n(), kept)?;
        let vertex_tally = self.vertex_tally(&edge_tally);
        Ok(SparsifierOutput { graph, edge_tally, vertex_tally, q_used: q, seed, epsilon })
    }
}

pub fn sample_sparsifier(
    g: &WeightedGraph,
    tbl: &ResistanceTable,
    cfg: &SparsifyConfig,
) -> Result<SparsifierOutput> {
    let n = g.n() as f64;
    if !(cfg.epsilon > 1.0 / n.sqrt() && cfg.epsilon <= 1.0) {
        log::warn!(
            "epsilon = {} lies outside (1/sqrt(n), 1] = ({:.4}, 1]; the spectral guarantee does not apply",
            cfg.epsilon,
            1.0 / n.sqrt()
        );
    }
    if !(cfg.oversample_c > 0.0) {
        return Err(Error::InvalidParameter(format!("oversample constant {} must be > 0", cfg.oversample_c)));
    }
    let pmf = cfg.pmf.as_deref().unwrap_or(&tbl.edge_prob);
    let sampler = EdgeSampler::new(g, pmf)?;
    sampler.sample(cfg.resolved_samples(g.n()), cfg.seed, cfg.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resistance::effective_resistances;

    #[test]
    fn default_sample_counts() {
        assert_eq!(expected_samples_default(100, 1.0, 1.0), 461);
        assert_eq!(expected_samples_default(2, 1.0, 1.0), 2);
        // 4000 ln 1000 / 0.25 = 110524.08, so the ceiling is 110525.
        assert_eq!(expected_samples_default(1000, 0.5, 4.0), 110_525);
    }

    #[test]
    fn single_draw_on_single_edge_reproduces_graph() {
        let g = WeightedGraph::new(2, [(0, 1, 2.5)]).unwrap();
        let t = effective_resistances(&g).unwrap();
        let out = sample_sparsifier(&g, &t, &SparsifyConfig::new(1.0, 9).with_samples(1)).unwrap();
        assert_eq!(out.graph, g);
        assert_eq!(out.vertex_tally, vec![1, 1]);
    }

    #[test]
    fn star_center_sees_every_draw() {
        let g = WeightedGraph::new(10, (1..10).map(|i| (0, i, 1.0))).unwrap();
        let t = effective_resistances(&g).unwrap();
        let out = sample_sparsifier(&g, &t, &SparsifyConfig::new(0.5, 3).with_samples(90)).unwrap();
        assert_eq!(out.vertex_tally[0], 90);
        assert_eq!(out.vertex_tally.iter().sum::<u64>(), 180);
    }

    #[test]
    fn triangle_weights_concentrate() {
        // tally ~ Bin(300, 1/3); weight = tally/100. Within 25% means
        // tally ∈ [75, 125], which the binomial puts at ≈0.999 per edge.
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let t = effective_resistances(&g).unwrap();
        let mut good = 0;
        for seed in 0..100 {
            let out = sample_sparsifier(&g, &t, &SparsifyConfig::new(0.5, seed).with_samples(300)).unwrap();
            if out.graph.m() == 3 && out.graph.edges().iter().all(|e| (e.w - 1.0).abs() <= 0.25) {
                good += 1;
            }
        }
        assert!(good >= 95, "only {good}/100 seeds within tolerance");
    }

    #[test]
    fn deterministic_per_seed() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 0.5), (0, 2, 1.0)]).unwrap();
        let t = effective_resistances(&g).unwrap();
        let cfg = SparsifyConfig::new(0.5, 1234).with_samples(50);
        let a = sample_sparsifier(&g, &t, &cfg).unwrap();
        let b = sample_sparsifier(&g, &t, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.graph.m() as u64 <= a.q_used);
        let c = sample_sparsifier(&g, &t, &cfg.clone().with_seed(1235)).unwrap();
        assert_ne!(a.edge_tally, c.edge_tally);
    }

    #[test]
    fn zero_pmf_entry_rejected() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let t = effective_resistances(&g).unwrap();
        let mut cfg = SparsifyConfig::new(0.5, 0).with_samples(10);
        cfg.pmf = Some(vec![1.0, 0.0]);
        assert!(matches!(sample_sparsifier(&g, &t, &cfg), Err(Error::NonPositivePmf { edge: 1, .. })));
    }

    #[test]
    fn zero_samples_rejected() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let t = effective_resistances(&g).unwrap();
        assert!(sample_sparsifier(&g, &t, &SparsifyConfig::new(0.5, 0).with_samples(0)).is_err());
    }

    #[test]
    fn implied_exponent() {
        let n = 256usize;
        let q = (n as f64 * (n as f64).ln()).ceil() as u64;
        assert!((implied_log_exponent(q, n).unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(implied_log_exponent(5, 2), None);
    }
}
