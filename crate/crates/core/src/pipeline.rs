//! Sparsify, certify and simulate, with resampling on certificate failure.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cert::{certify_adjacency, eps_tilde_measured, LaplacianReference, SpectralCertificate};
use crate::error::{Error, Result, EXIT_CERTIFICATE, EXIT_OK};
use crate::generators::{gen_graph, Family, WeightDist};
use crate::graph::WeightedGraph;
use crate::hamsim::{eps_prime_budget, sweep_csv, EvolutionErrorReport, EvolutionPair, MAX_EVOLUTION_DIM};
use crate::linalg::sym_spectral_norm;
use crate::par::Execution;
use crate::resistance::{effective_resistances_with, foster_check, ResistanceTable};
use crate::rowsparsity::{row_sparsity_report, RowSparsityParams, RowSparsityReport};
use crate::sparsifier::{rng_from_seed, sample_sparsifier, SparsifierOutput, SparsifyConfig, DEFAULT_OVERSAMPLE, RNG_NAME};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    File { path: PathBuf },
    Generate { family: Family, #[serde(default)] weights: WeightDist },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub graph: GraphSource,
    /// Sparsifier accuracy. Derived from the simulation budget when absent.
    pub epsilon: Option<f64>,
    pub eps_sim: f64,
    pub t: f64,
    /// Constant in front of the `ε′` budget.
    pub budget_constant: f64,
    /// Fraction of `ε′` given to `ε`; the rest goes to `ε̃`.
    pub split: f64,
    pub oversample_c: f64,
    /// Explicit sample count, overriding `⌈C n ln n / ε²⌉`.
    pub samples: Option<u64>,
    pub b: Option<f64>,
    /// Monte Carlo repetitions for the occupancy statistics.
    pub rowsparsity_seeds: usize,
    pub retry_limit: u32,
    /// Evolution times; defaults to `t/4, t/2, 3t/4, t`.
    pub t_grid: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::Generate { family: Family::Random { n: 200, p: 0.1 }, weights: WeightDist::Unit },
            epsilon: None,
            eps_sim: 0.01,
            t: 1.0,
            budget_constant: 1.0,
            split: 0.5,
            oversample_c: DEFAULT_OVERSAMPLE,
            samples: None,
            b: None,
            rowsparsity_seeds: 20,
            retry_limit: 3,
            t_grid: None,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.retry_limit < 1 {
            return bad("retry_limit must be >= 1".into());
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return bad(format!("split must be in (0, 1), got {}", self.split));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return bad(format!("epsilon must be > 0, got {e}"));
            }
        }
        if !(self.eps_sim > 0.0 && self.t > 0.0 && self.budget_constant > 0.0) {
            return bad("eps_sim, t and budget_constant must be > 0".into());
        }
        if self.rowsparsity_seeds == 0 {
            return bad("rowsparsity_seeds must be >= 1".into());
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| (1..=4).map(|k| self.t * k as f64 / 4.0).collect())
    }
}

pub fn load_graph(source: &GraphSource, seed: u64) -> Result<WeightedGraph> {
    match source {
        GraphSource::File { path } => WeightedGraph::read_edge_list(BufReader::new(fs::File::open(path)?)),
        GraphSource::Generate { family, weights } => gen_graph(*family, *weights, seed),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Budget {
    pub norm_h: f64,
    pub eps_prime: f64,
    pub epsilon: f64,
    pub eps_tilde: f64,
    /// True when `epsilon` came from the config rather than the budget.
    pub epsilon_from_config: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attempt {
    pub attempt: u32,
    pub seed: u64,
    pub q: u64,
    pub kept_edges: usize,
    /// Absent when the sample missed a direction in the range of `L`.
    pub certificate: Option<SpectralCertificate>,
    pub failure: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub foster_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub seed: u64,
    pub rng: &'static str,
    pub graph: GraphSummary,
    pub budget: Budget,
    pub attempts: Vec<Attempt>,
    pub passed: bool,
    pub row_sparsity: Option<RowSparsityReport>,
    pub warnings: Vec<String>,
    pub evolution: Vec<EvolutionErrorReport>,
    pub exit_code: i32,
}

/// Everything needed to write the bundle.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: PipelineReport,
    pub graph: WeightedGraph,
    pub resistances: ResistanceTable,
    pub sparsifier: SparsifierOutput,
}

impl PipelineOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report)? + "\n")
    }

    /// Writes `report.json`, `resistances.csv`, `marginals.csv`,
    /// `sparsifier.edges`, `sparsifier.json` and `evolution.csv`.
    pub fn write_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        fs::write(dir.join("resistances.csv"), self.resistances.edges_csv(&self.graph))?;
        fs::write(dir.join("marginals.csv"), self.resistances.vertices_csv())?;
        fs::write(dir.join("sparsifier.edges"), self.sparsifier.graph.to_edge_list())?;
        fs::write(dir.join("sparsifier.json"), serde_json::to_string_pretty(&self.sparsifier.sidecar())? + "\n")?;
        fs::write(dir.join("evolution.csv"), sweep_csv(&self.report.evolution))?;
        Ok(())
    }
}

fn budget(cfg: &PipelineConfig, norm_h: f64) -> Budget {
    match cfg.epsilon {
        Some(epsilon) => {
            let eps_prime = epsilon / cfg.split;
            Budget { norm_h, eps_prime, epsilon, eps_tilde: eps_prime - epsilon, epsilon_from_config: true }
        }
        None => {
            let eps_prime = eps_prime_budget(cfg.eps_sim, cfg.t, norm_h, cfg.budget_constant);
            Budget {
                norm_h,
                eps_prime,
                epsilon: cfg.split * eps_prime,
                eps_tilde: (1.0 - cfg.split) * eps_prime,
                epsilon_from_config: false,
            }
        }
    }
}

fn attempt(
    g: &WeightedGraph,
    tbl: &ResistanceTable,
    reference: &LaplacianReference,
    cfg: &PipelineConfig,
    b: &Budget,
    index: u32,
    seed: u64,
) -> Result<(Attempt, SparsifierOutput)> {
    let mut scfg = SparsifyConfig::new(b.epsilon, seed).with_oversample(cfg.oversample_c);
    if let Some(q) = cfg.samples {
        scfg = scfg.with_samples(q);
    }
    let out = sample_sparsifier(g, tbl, &scfg)?;
    let base = Attempt {
        attempt: index,
        seed,
        q: out.q_used,
        kept_edges: out.graph.m(),
        certificate: None,
        failure: None,
        passed: false,
    };
    let lap = match reference.certify(&out.graph.laplacian(), b.epsilon) {
        Ok(c) => c,
        Err(e @ Error::KernelNotContained { .. }) => {
            return Ok((Attempt { failure: Some(e.to_string()), ..base }, out));
        }
        Err(e) => return Err(e),
    };
    let d = g.degrees();
    let adjacency = certify_adjacency(&g.adjacency(), &out.graph.adjacency(), &d, b.eps_prime)?;
    let cert = SpectralCertificate {
        eps_tilde_measured: eps_tilde_measured(&d, &out.graph.degrees()),
        laplacian: lap,
        adjacency,
    };
    let passed = cert.passed();
    Ok((Attempt { certificate: Some(cert), passed, ..base }, out))
}

pub fn run_pipeline(cfg: &PipelineConfig, exec: Execution) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let mut seeds = rng_from_seed(cfg.seed);
    let g = load_graph(&cfg.graph, seeds.random())?;
    let mut warnings = Vec::new();

    let tbl = effective_resistances_with(&g, exec)?;
    let graph = GraphSummary { n: g.n(), m: g.m(), components: tbl.components, foster_residual: foster_check(&g, &tbl) };
    if graph.foster_residual > 1e-8 * g.n() as f64 {
        return Err(Error::Numeric(format!("Foster residual {:.3e} too large", graph.foster_residual)));
    }

    let norm_h = sym_spectral_norm(&g.adjacency())?;
    let b = budget(cfg, norm_h);
    let reference = LaplacianReference::new(&g.laplacian())?;

    let mut attempts = Vec::new();
    let mut last = None;
    for k in 1..=cfg.retry_limit {
        let (a, out) = attempt(&g, &tbl, &reference, cfg, &b, k, seeds.random())?;
        let passed = a.passed;
        if !passed {
            log::warn!("attempt {k} failed certification; resampling");
        }
        attempts.push(a);
        last = Some(out);
        if passed {
            break;
        }
    }
    let sparsifier = last.expect("retry_limit >= 1");
    let passed = attempts.last().is_some_and(|a| a.passed);

    let row_sparsity = if g.n() >= 3 {
        let params = RowSparsityParams {
            q: sparsifier.q_used,
            a: None,
            b: cfg.b,
            seeds: cfg.rowsparsity_seeds,
            base_seed: seeds.random(),
        };
        let r = row_sparsity_report(&g, &tbl, &params, exec)?;
        if !r.marginal.passes {
            let msg = format!(
                "vertex marginal condition fails: max p_v = {:.6} > (ln n)^b/n = {:.6}",
                r.max_marginal, r.marginal_threshold
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Some(r)
    } else {
        warnings.push("row-sparsity report skipped for n < 3".into());
        None
    };

    let evolution = if g.n() <= MAX_EVOLUTION_DIM {
        EvolutionPair::new(&g.adjacency(), &sparsifier.graph.adjacency())?.sweep(&cfg.times(), exec)
    } else {
        let msg = format!("evolution sweep skipped for n > {MAX_EVOLUTION_DIM}");
        log::warn!("{msg}");
        warnings.push(msg);
        Vec::new()
    };

    let report = PipelineReport {
        config: cfg.clone(),
        seed: cfg.seed,
        rng: RNG_NAME,
        graph,
        budget: b,
        attempts,
        passed,
        row_sparsity,
        warnings,
        evolution,
        exit_code: if passed { EXIT_OK } else { EXIT_CERTIFICATE },
    };
    Ok(PipelineOutcome { report, graph: g, resistances: tbl, sparsifier })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generated(family: Family) -> GraphSource {
        GraphSource::Generate { family, weights: WeightDist::Unit }
    }

    #[test]
    fn triangle_passes_first_time() {
        let cfg = PipelineConfig {
            graph: generated(Family::Complete { n: 3 }),
            epsilon: Some(1.0),
            samples: Some(100_000),
            ..Default::default()
        };
        let out = run_pipeline(&cfg, Execution::Sequential).unwrap();
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.report.attempts.len(), 1);
    }

    #[test]
    fn star_warns_but_continues() {
        let cfg = PipelineConfig {
            graph: generated(Family::Star { n: 64 }),
            epsilon: Some(0.5),
            b: Some(1.0),
            rowsparsity_seeds: 4,
            ..Default::default()
        };
        let out = run_pipeline(&cfg, Execution::Sequential).unwrap();
        let r = out.report.row_sparsity.as_ref().unwrap();
        assert!(!r.marginal.passes);
        assert_eq!(out.report.warnings.len(), 1);
        assert!(!out.report.evolution.is_empty());
    }

    #[test]
    fn exhausted_retries_exit_2() {
        let cfg = PipelineConfig {
            graph: generated(Family::Cycle { n: 12 }),
            epsilon: Some(0.01),
            samples: Some(12),
            retry_limit: 2,
            rowsparsity_seeds: 2,
            ..Default::default()
        };
        let out = run_pipeline(&cfg, Execution::Sequential).unwrap();
        assert_eq!(out.exit_code(), EXIT_CERTIFICATE);
        assert_eq!(out.report.attempts.len(), 2);
        assert_ne!(out.report.attempts[0].seed, out.report.attempts[1].seed);
    }

    #[test]
    fn bad_config() {
        let cfg = PipelineConfig { retry_limit: 0, ..Default::default() };
        assert_eq!(run_pipeline(&cfg, Execution::Sequential).unwrap_err().exit_code(), 3);
    }
}
