use proptest::prelude::*;

use qsparse::graph::WeightedGraph;
use qsparse::linalg::{SymEig, NULL_SPACE_RTOL};

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..24).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0.05f64..10.0), 0..3 * n).prop_map(move |raw| {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v, _)| u != v).collect();
            WeightedGraph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_degree_minus_adjacency(g in arb_graph()) {
        let l = g.laplacian();
        let a = g.adjacency();
        let d = g.degrees();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let want = if i == j { d.0[i] } else { 0.0 } - a[(i, j)];
                prop_assert_eq!(l[(i, j)], want);
            }
            let row: f64 = (0..g.n()).map(|j| l[(i, j)]).sum();
            prop_assert!(row.abs() <= 1e-12 * d.max().max(1.0));
        }
    }

    #[test]
    fn incidence_gram_is_laplacian(g in arb_graph()) {
        let l = g.laplacian();
        let btb = g.incidence().gram();
        let tol = 1e-12 * (1.0 + g.degrees().max());
        for i in 0..g.n() {
            for j in 0..g.n() {
                prop_assert!((btb[(i, j)] - l[(i, j)]).abs() <= tol);
            }
        }
    }

    #[test]
    fn laplacian_psd_with_kernel_per_component(g in arb_graph()) {
        let eig = SymEig::new(&g.laplacian()).unwrap();
        let norm = eig.spectral_norm();
        prop_assert!(eig.values[0] >= -1e-9 * norm);
        let zeros = if norm == 0.0 { g.n() } else { eig.null_indices(NULL_SPACE_RTOL).len() };
        prop_assert_eq!(zeros, g.connected_components().count);
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        let text = g.to_edge_list();
        let back = WeightedGraph::read_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }
}
