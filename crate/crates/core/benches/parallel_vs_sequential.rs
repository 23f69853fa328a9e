use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;

use qsparse::generators::{gen_graph, Family, WeightDist};
use qsparse::qsim::ae::{full_sparsity_scan, ScanConfig};
use qsparse::qsim::OracleMatrix;
use qsparse::resistance::effective_resistances;
use qsparse::rowsparsity::empirical_occupancy;
use qsparse::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn occupancy(c: &mut Criterion) {
    let g = gen_graph(Family::Random { n: 256, p: 0.05 }, WeightDist::Unit, 3).unwrap();
    let tbl = effective_resistances(&g).unwrap();
    let q = (256.0 * 256f64.ln()) as u64;
    let mut group = c.benchmark_group("occupancy_200_seeds");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| empirical_occupancy(&g, &tbl.edge_prob, q, 30.0, 200, 0, exec).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let a = DMatrix::from_fn(16, 16, |i, j| if (i * 7 + j * 3) % 5 == 0 { 1.0 } else { 0.0 });
    let m = OracleMatrix::from_dense(&a, 16, None).unwrap();
    let cfg = ScanConfig { delta: 0.5, eps: 0.5, counting_qubits: None, cap_qubits: 32, threshold: 16.0, seed: 0 };
    let mut group = c.benchmark_group("ae_scan_n16");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| full_sparsity_scan(&m, &cfg, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, occupancy, scan);
criterion_main!(benches);
