//! Row-sparsity analysis of sampled sparsifiers: the vertex-marginal
//! condition, the union-bounded Chernoff tail on the busiest row, the bound
//! on its expectation, and Monte-Carlo occupancy statistics to compare
//! against both.
//!
//! Base conventions: the marginal threshold `(ln n)^b / n` and the exponents
//! `a`, `b` use natural logs. The tail and expectation bounds are evaluated
//! with `log₂`, in log space, so they never underflow to a misleading value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::par::Execution;
use crate::resistance::ResistanceTable;
use crate::sparsifier::{implied_log_exponent, EdgeSampler};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalCondition {
    pub b: f64,
    pub threshold: f64,
    pub max_marginal: f64,
    /// Vertices with `p_v > (ln n)^b / n`.
    pub violators: Vec<usize>,
    pub passes: bool,
}

/// Relative slack on the marginal comparison, so an implied `b` passes.
pub const MARGINAL_RTOL: f64 = 1e-12;

pub fn vertex_marginal_condition(tbl: &ResistanceTable, b: f64) -> Result<MarginalCondition> {
    let n = tbl.vertex_marginal.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("marginal condition needs n >= 3, got {n}")));
    }
    let threshold = marginal_threshold(n, b);
    let violators: Vec<usize> = tbl
        .vertex_marginal
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > threshold * (1.0 + MARGINAL_RTOL))
        .map(|(v, _)| v)
        .collect();
    Ok(MarginalCondition {
        b,
        threshold,
        max_marginal: tbl.max_marginal(),
        passes: violators.is_empty(),
        violators,
    })
}

/// `(ln n)^b / n`.
pub fn marginal_threshold(n: usize, b: f64) -> f64 {
    let n = n as f64;
    n.ln().powf(b) / n
}

/// Smallest `b` for which the marginal condition holds: `ln(n·max p_v) / ln ln n`.
pub fn implied_marginal_exponent(n: usize, max_marginal: f64) -> f64 {
    let nf = n as f64;
    (nf * max_marginal).ln() / nf.ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub c: f64,
    /// `R = (log₂ n)^{c+1}`.
    pub r: f64,
    pub log2_bound: f64,
    /// `min(1, n·2^{−R})`; may be 0.0 when `log2_bound < −1074`.
    pub bound: f64,
}

/// Union-bounded Chernoff tail `P(maxᵢ xᵢ ≥ R) ≤ n·2^{−(log₂ n)^{c+1}}`,
/// `c = a + b`.
pub fn prop1_tail_bound(n: usize, a: f64, b: f64) -> TailBound {
    let l2 = (n as f64).log2();
    let c = a + b;
    let r = l2.powf(c + 1.0);
    let log2_bound = (l2 - r).min(0.0);
    TailBound { c, r, log2_bound, bound: log2_bound.exp2() }
}

/// The Chernoff form `P(X ≥ R) ≤ 2^{−R}` needs `R ≥ 6μ`.
pub fn chernoff_regime_holds(r: f64, mu: f64) -> bool {
    r >= 6.0 * mu
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationBound {
    pub first_term: f64,
    pub log2_second_term: f64,
    pub second_term: f64,
    pub bound: f64,
}

/// `E[maxᵢ xᵢ] ≤ (log₂ n)^c + n² (log₂ n)^a 2^{−(log₂ n)^{c+1}}`.
pub fn prop2_expectation_bound(n: usize, a: f64, b: f64) -> ExpectationBound {
    let l2 = (n as f64).log2();
    let c = a + b;
    let first_term = l2.powf(c);
    let log2_second_term = 2.0 * l2 + a * l2.log2() - l2.powf(c + 1.0);
    let second_term = log2_second_term.exp2();
    ExpectationBound { first_term, log2_second_term, second_term, bound: first_term + second_term }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyStats {
    pub seeds: usize,
    pub q: u64,
    pub r: f64,
    /// `maxᵢ xᵢ` per seed, in seed order.
    pub max_occupancy: Vec<u64>,
    /// Largest realized degree (distinct sampled edges) per seed.
    pub max_realized_degree: Vec<usize>,
    pub mean_max_occupancy: f64,
    pub worst_max_occupancy: u64,
    pub tail_freq: f64,
}

/// Reruns the sampler for seeds `base_seed, base_seed+1, …` and records
/// the busiest row's incident sample count.
pub fn empirical_occupancy(
    g: &WeightedGraph,
    pmf: &[f64],
    q: u64,
    r: f64,
    seeds: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<OccupancyStats> {
    if seeds == 0 {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let sampler = EdgeSampler::new(g, pmf)?;
    let per_seed = exec.map_range(seeds, |k| {
        let tally = sampler.tally(q, base_seed.wrapping_add(k as u64));
        let x = sampler.vertex_tally(&tally);
        let mut deg = vec![0usize; g.n()];
        for (e, &t) in g.edges().iter().zip(&tally) {
            if t > 0 {
                deg[e.u] += 1;
                deg[e.v] += 1;
            }
        }
        (x.into_iter().max().unwrap_or(0), deg.into_iter().max().unwrap_or(0))
    });
    let (max_occupancy, max_realized_degree): (Vec<u64>, Vec<usize>) = per_seed.into_iter().unzip();
    let mean = max_occupancy.iter().map(|&x| x as f64).sum::<f64>() / seeds as f64;
    let hits = max_occupancy.iter().filter(|&&x| x as f64 >= r).count();
    Ok(OccupancyStats {
        seeds,
        q,
        r,
        worst_max_occupancy: max_occupancy.iter().copied().max().unwrap_or(0),
        mean_max_occupancy: mean,
        tail_freq: hits as f64 / seeds as f64,
        max_occupancy,
        max_realized_degree,
    })
}

/// Three binomial standard errors at probability `p`.
pub fn monte_carlo_slack(p: f64, seeds: usize) -> f64 {
    3.0 * (p * (1.0 - p) / seeds as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSparsityReport {
    pub n: usize,
    pub q: u64,
    pub log_base_marginal: &'static str,
    pub log_base_bounds: &'static str,
    pub max_marginal: f64,
    pub marginal_threshold: f64,
    pub marginal: MarginalCondition,
    pub a_implied: f64,
    pub b: f64,
    pub b_implied: f64,
    pub c: f64,
    pub mu: f64,
    /// `(ln n)^{c+1}`; the empirical tail is measured against this.
    pub r_threshold: f64,
    pub prop1: TailBound,
    pub prop1_applicable: bool,
    /// `None` when the Chernoff regime `R ≥ 6μ` does not hold.
    pub prop1_bound: Option<f64>,
    pub prop2_expectation_bound: f64,
    pub prop2: ExpectationBound,
    pub empirical_max_occupancy: f64,
    pub empirical_tail_freq: f64,
    pub tail_dominated: Option<bool>,
    pub mean_dominated: bool,
    pub occupancy: OccupancyStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowSparsityParams {
    pub q: u64,
    /// Sample-budget exponent; implied from `q` when `None`.
    pub a: Option<f64>,
    /// Marginal exponent; implied from the largest marginal when `None`.
    pub b: Option<f64>,
    pub seeds: usize,
    pub base_seed: u64,
}

pub fn row_sparsity_report(
    g: &WeightedGraph,
    tbl: &ResistanceTable,
    params: &RowSparsityParams,
    exec: Execution,
) -> Result<RowSparsityReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("row-sparsity report needs n >= 3, got {n}")));
    }
    let max_marginal = tbl.max_marginal();
    let a = params.a.unwrap_or_else(|| implied_log_exponent(params.q, n).expect("n >= 3"));
    let b_implied = implied_marginal_exponent(n, max_marginal);
    let b = params.b.unwrap_or(b_implied);
    let c = a + b;
    let ln_n = (n as f64).ln();
    let r_threshold = ln_n.powf(c + 1.0);
    let mu = params.q as f64 * max_marginal;
    let prop1 = prop1_tail_bound(n, a, b);
    let prop1_applicable = chernoff_regime_holds(prop1.r, mu);
    let prop2 = prop2_expectation_bound(n, a, b);
    let marginal = vertex_marginal_condition(tbl, b)?;
    let occupancy = empirical_occupancy(g, &tbl.edge_prob, params.q, r_threshold, params.seeds, params.base_seed, exec)?;
    let prop1_bound = prop1_applicable.then_some(prop1.bound);
    let tail_dominated = prop1_bound
        .map(|p| occupancy.tail_freq <= p + monte_carlo_slack(p, params.seeds));
    Ok(RowSparsityReport {
        n,
        q: params.q,
        log_base_marginal: "e",
        log_base_bounds: "2",
        max_marginal,
        marginal_threshold: marginal.threshold,
        marginal,
        a_implied: a,
        b,
        b_implied,
        c,
        mu,
        r_threshold,
        prop1,
        prop1_applicable,
        prop1_bound,
        prop2_expectation_bound: prop2.bound,
        prop2,
        empirical_max_occupancy: occupancy.mean_max_occupancy,
        empirical_tail_freq: occupancy.tail_freq,
        tail_dominated,
        mean_dominated: occupancy.mean_max_occupancy <= prop2.bound,
        occupancy,
    })
}
