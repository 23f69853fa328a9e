use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsparse::cert::{certify_adjacency, eps_tilde_measured, LaplacianReference, SpectralCertificate};
use qsparse::error::{Error, Result, EXIT_CERTIFICATE, EXIT_OK};
use qsparse::generators::{gen_graph, Family, WeightDist};
use qsparse::hamsim::{sweep_csv, EvolutionPair};
use qsparse::pipeline::{run_pipeline, GraphSource, PipelineConfig};
use qsparse::qsim::ae::{full_sparsity_scan, DEFAULT_CAP_QUBITS};
use qsparse::qsim::fixed::DEFAULT_FRAC_BITS;
use qsparse::qsim::{estimate_row_sparsity_ae, find_max_row_sum, OracleMatrix, ScanConfig};
use qsparse::resistance::{effective_resistances_with, foster_check};
use qsparse::rowsparsity::{row_sparsity_report, RowSparsityParams};
use qsparse::sparsifier::{sample_sparsifier, SparsifyConfig, DEFAULT_OVERSAMPLE};
use qsparse::{Execution, WeightedGraph};

#[derive(Parser, Debug)]
#[command(name = "qsparse", version, about = "Spectral sparsification and row-sparsity experiments")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory; files are written there instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph in edge-list format.
    Gen(GraphArgs),
    /// Effective resistances and sampling probabilities.
    Resist(GraphArgs),
    /// Sample a sparsifier.
    Sparsify {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Certify a sparsifier against its graph.
    Certify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Candidate sparsifier edge list.
        #[arg(long)]
        sparsifier: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Adjacency tolerance; defaults to twice epsilon.
        #[arg(long)]
        eps_prime: Option<f64>,
    },
    /// Vertex marginals, occupancy bounds and Monte Carlo occupancy.
    Rowsparsity {
        #[command(flatten)]
        graph: GraphArgs,
        /// Draw count; defaults to n ln n.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        /// Monte Carlo repetitions.
        #[arg(long, default_value_t = 200)]
        seeds: usize,
    },
    /// Evolution error between a graph and a sparsifier.
    Hamsim {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        sparsifier: PathBuf,
        /// Comma-separated evolution times.
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
        times: Vec<f64>,
    },
    /// Amplitude-estimation row-support scan.
    QtestAe {
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Counting register width; derived from n and eps when absent.
        #[arg(long)]
        counting_qubits: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_CAP_QUBITS)]
        cap_qubits: u32,
        /// Estimate a single row only.
        #[arg(long)]
        row: Option<usize>,
        /// Support above this fails the verdict; defaults to (log2 n)^2.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Maximum row sum by quantum maximum finding.
    QtestMax {
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Full sparsify, certify and simulate run.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    Random,
    Cycle,
    Path,
    Grid,
    Star,
    Complete,
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    /// Edge-list file; a generated graph is used when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "random")]
    family: FamilyName,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    /// Uniform weights on [lo, hi) when both bounds are given.
    #[arg(long, requires = "weight_hi")]
    weight_lo: Option<f64>,
    #[arg(long, requires = "weight_lo")]
    weight_hi: Option<f64>,
}

impl GraphArgs {
    fn source(&self) -> GraphSource {
        match &self.graph {
            Some(path) => GraphSource::File { path: path.clone() },
            None => {
                let family = match self.family {
                    FamilyName::Random => Family::Random { n: self.n, p: self.p },
                    FamilyName::Cycle => Family::Cycle { n: self.n },
                    FamilyName::Path => Family::Path { n: self.n },
                    FamilyName::Grid => Family::Grid { rows: self.rows, cols: self.cols },
                    FamilyName::Star => Family::Star { n: self.n },
                    FamilyName::Complete => Family::Complete { n: self.n },
                };
                let weights = match (self.weight_lo, self.weight_hi) {
                    (Some(lo), Some(hi)) => WeightDist::Uniform { lo, hi },
                    _ => WeightDist::Unit,
                };
                GraphSource::Generate { family, weights }
            }
        }
    }

    fn load(&self, seed: u64) -> Result<WeightedGraph> {
        match self.source() {
            GraphSource::File { path } => read_graph(&path),
            GraphSource::Generate { family, weights } => gen_graph(family, weights, seed),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SampleArgs {
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Oversampling constant C in q = C n ln n / eps^2.
    #[arg(long = "c", default_value_t = DEFAULT_OVERSAMPLE)]
    oversample: f64,
    /// Explicit draw count.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct MatrixArgs {
    /// Dense matrix CSV; otherwise the adjacency of the graph options is used.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = DEFAULT_FRAC_BITS)]
    frac_bits: u32,
    /// Normalization bound; defaults to the largest entry magnitude.
    #[arg(long)]
    lambda: Option<f64>,
}

impl MatrixArgs {
    fn load(&self, seed: u64) -> Result<OracleMatrix> {
        match &self.matrix {
            Some(path) => OracleMatrix::from_dense(&OracleMatrix::parse_csv(&fs::read_to_string(path)?)?, self.frac_bits, self.lambda),
            None => OracleMatrix::from_graph(&self.graph.load(seed)?, self.frac_bits),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PipelineArgs {
    /// JSON pipeline config; other flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    /// Sparsifier accuracy; derived from the simulation budget when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    eps_sim: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    budget_constant: f64,
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    #[arg(long = "c", default_value_t = DEFAULT_OVERSAMPLE)]
    oversample: f64,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long, default_value_t = 20)]
    rowsparsity_seeds: usize,
    #[arg(long, default_value_t = 3)]
    retry_limit: u32,
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
}

fn read_graph(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::read_edge_list(BufReader::new(fs::File::open(path)?))
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn emit_text(text: &str) -> Result<()> {
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn write_files(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    per_row_estimates: &'a [f64],
    max_estimate: f64,
    ledger: qsparse::qsim::QueryLedger,
    verdict: &'a str,
    detail: &'a qsparse::qsim::ScanReport,
}

fn run(cli: &Cli) -> Result<i32> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let seed = cli.seed;
    match &cli.cmd {
        Command::Gen(args) => {
            let g = args.load(seed)?;
            let text = g.to_edge_list();
            match &cli.out {
                Some(dir) => write_files(dir, &[("graph.edges", text)])?,
                None if !cli.json => emit_text(&text)?,
                None => {}
            }
            if cli.json {
                emit_json(&serde_json::json!({ "n": g.n(), "m": g.m(), "seed": seed }))?;
            }
        }
        Command::Resist(args) => {
            let g = args.load(seed)?;
            let tbl = effective_resistances_with(&g, exec)?;
            let edges = tbl.edges_csv(&g);
            if let Some(dir) = &cli.out {
                write_files(dir, &[("resistances.csv", edges.clone()), ("marginals.csv", tbl.vertices_csv())])?;
            }
            if cli.json {
                emit_json(&serde_json::json!({ "foster_residual": foster_check(&g, &tbl), "table": tbl }))?;
            } else if cli.out.is_none() {
                emit_text(&edges)?;
            }
        }
        Command::Sparsify { graph, sample } => {
            let g = graph.load(seed)?;
            let tbl = effective_resistances_with(&g, exec)?;
            let mut cfg = SparsifyConfig::new(sample.epsilon, seed).with_oversample(sample.oversample);
            if let Some(q) = sample.samples {
                cfg = cfg.with_samples(q);
            }
            let out = sample_sparsifier(&g, &tbl, &cfg)?;
            let text = out.graph.to_edge_list();
            if let Some(dir) = &cli.out {
                write_files(
                    dir,
                    &[("sparsifier.edges", text.clone()), ("sparsifier.json", serde_json::to_string_pretty(&out.sidecar())? + "\n")],
                )?;
            }
            if cli.json {
                emit_json(&out.sidecar())?;
            } else if cli.out.is_none() {
                emit_text(&text)?;
            }
        }
        Command::Certify { graph, sparsifier, epsilon, eps_prime } => {
            let g = graph.load(seed)?;
            let s = read_graph(sparsifier)?;
            if s.n() != g.n() {
                return Err(Error::DimensionMismatch(g.n(), s.n()));
            }
            let lap = LaplacianReference::new(&g.laplacian())?.certify(&s.laplacian(), *epsilon)?;
            let d = g.degrees();
            let adjacency = certify_adjacency(&g.adjacency(), &s.adjacency(), &d, eps_prime.unwrap_or(2.0 * epsilon))?;
            let cert = SpectralCertificate { eps_tilde_measured: eps_tilde_measured(&d, &s.degrees()), laplacian: lap, adjacency };
            if let Some(dir) = &cli.out {
                write_files(dir, &[("certificate.json", serde_json::to_string_pretty(&cert)? + "\n")])?;
            }
            if cli.json {
                emit_json(&cert)?;
            } else {
                emit_text(&format!(
                    "laplacian {} (pencil [{:.6}, {:.6}], eps {})\nadjacency {} (deviation {:.6} vs bound {:.6})\n",
                    if cert.laplacian.verdict { "PASS" } else { "FAIL" },
                    cert.laplacian.pencil_min,
                    cert.laplacian.pencil_max,
                    epsilon,
                    if cert.adjacency.verdict { "PASS" } else { "FAIL" },
                    cert.adjacency.deviation,
                    cert.adjacency.bound,
                ))?;
            }
            return Ok(if cert.passed() { EXIT_OK } else { EXIT_CERTIFICATE });
        }
        Command::Rowsparsity { graph, samples, a, b, seeds } => {
            let g = graph.load(seed)?;
            let tbl = effective_resistances_with(&g, exec)?;
            let nf = g.n() as f64;
            let q = samples.unwrap_or((nf * nf.ln()).ceil() as u64);
            let params = RowSparsityParams { q, a: *a, b: *b, seeds: *seeds, base_seed: seed };
            let report = row_sparsity_report(&g, &tbl, &params, exec)?;
            if let Some(dir) = &cli.out {
                write_files(dir, &[("rowsparsity.json", serde_json::to_string_pretty(&report)? + "\n"), ("marginals.csv", tbl.vertices_csv())])?;
            }
            if cli.json || cli.out.is_none() {
                emit_json(&report)?;
            }
        }
        Command::Hamsim { graph, sparsifier, times } => {
            let g = graph.load(seed)?;
            let s = read_graph(sparsifier)?;
            let pair = EvolutionPair::new(&g.adjacency(), &s.adjacency())?;
            let rows = pair.sweep(times, exec);
            let csv = sweep_csv(&rows);
            if let Some(dir) = &cli.out {
                write_files(dir, &[("evolution.csv", csv.clone())])?;
            }
            if cli.json {
                emit_json(&rows)?;
            } else if cli.out.is_none() {
                emit_text(&csv)?;
            }
        }
        Command::QtestAe { matrix, delta, eps, counting_qubits, cap_qubits, row, threshold } => {
            let m = matrix.load(seed)?;
            if let Some(i) = row {
                let k = counting_qubits.unwrap_or_else(|| qsparse::qsim::ae::scan_counting_qubits(m.n(), *eps));
                let est = estimate_row_sparsity_ae(&m, *i, *delta, k, *cap_qubits, seed)?;
                emit_json(&est)?;
                return Ok(EXIT_OK);
            }
            let n = m.n() as f64;
            let cfg = ScanConfig {
                delta: *delta,
                eps: *eps,
                counting_qubits: *counting_qubits,
                cap_qubits: *cap_qubits,
                threshold: threshold.unwrap_or(n.log2().powi(2)),
                seed,
            };
            let report = full_sparsity_scan(&m, &cfg, exec)?;
            let output = ScanOutput {
                per_row_estimates: &report.per_row_estimates,
                max_estimate: report.max_estimate,
                ledger: report.ledger,
                verdict: report.verdict,
                detail: &report,
            };
            if let Some(dir) = &cli.out {
                write_files(dir, &[("qtest_ae.json", serde_json::to_string_pretty(&output)? + "\n")])?;
            }
            if cli.json || cli.out.is_none() {
                emit_json(&output)?;
            }
        }
        Command::QtestMax { matrix } => {
            let m = matrix.load(seed)?;
            let r = find_max_row_sum(&m, seed)?;
            if let Some(dir) = &cli.out {
                write_files(dir, &[("qtest_max.json", serde_json::to_string_pretty(&r)? + "\n")])?;
            }
            if cli.json || cli.out.is_none() {
                emit_json(&r)?;
            }
        }
        Command::Pipeline(args) => {
            let cfg = match &args.config {
                Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
                None => PipelineConfig {
                    graph: args.graph.source(),
                    epsilon: args.epsilon,
                    eps_sim: args.eps_sim,
                    t: args.t,
                    budget_constant: args.budget_constant,
                    split: args.split,
                    oversample_c: args.oversample,
                    samples: args.samples,
                    b: args.b,
                    rowsparsity_seeds: args.rowsparsity_seeds,
                    retry_limit: args.retry_limit,
                    t_grid: args.t_grid.clone(),
                    seed,
                },
            };
            let outcome = run_pipeline(&cfg, exec)?;
            if let Some(dir) = &cli.out {
                outcome.write_bundle(dir)?;
            }
            if cli.json {
                emit_text(&outcome.to_json()?)?;
            } else {
                let r = &outcome.report;
                emit_text(&format!(
                    "{} after {} attempt(s); n={} m={} kept={}\n",
                    if r.passed { "certified" } else { "not certified" },
                    r.attempts.len(),
                    r.graph.n,
                    r.graph.m,
                    outcome.sparsifier.graph.m(),
                ))?;
            }
            return Ok(outcome.exit_code());
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
