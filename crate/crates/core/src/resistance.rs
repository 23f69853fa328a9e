//! Exact effective resistances through the Laplacian pseudoinverse and the
//! edge/vertex sampling distributions they induce.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{SymEig, NULL_SPACE_RTOL};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceTable {
    /// `R_e` per edge, in the graph's edge order.
    pub resistance: Vec<f64>,
    /// `p_e = w_e R_e / Σ_f w_f R_f`.
    pub edge_prob: Vec<f64>,
    /// `p_v = Σ_{e ∋ v} p_e`; sums to 2.
    pub vertex_marginal: Vec<f64>,
    pub components: usize,
}

impl ResistanceTable {
    /// Marginals of an arbitrary edge pmf. Does not normalize.
    pub fn marginals_of(g: &WeightedGraph, edge_prob: &[f64]) -> Vec<f64> {
        let mut pv = vec![0.0; g.n()];
        for (e, p) in g.edges().iter().zip(edge_prob) {
            pv[e.u] += p;
            pv[e.v] += p;
        }
        pv
    }

    pub fn max_marginal(&self) -> f64 {
        self.vertex_marginal.iter().copied().fold(0.0, f64::max)
    }

    /// `edge_index,u,v,w,R,p_e` rows.
    pub fn edges_csv(&self, g: &WeightedGraph) -> String {
        let mut s = String::from("edge_index,u,v,w,R,p_e\n");
        for (k, e) in g.edges().iter().enumerate() {
            s.push_str(&format!(
                "{k},{},{},{:?},{:?},{:?}\n",
                e.u, e.v, e.w, self.resistance[k], self.edge_prob[k]
            ));
        }
        s
    }

    pub fn vertices_csv(&self) -> String {
        let mut s = String::from("vertex,p_v\n");
        for (v, p) in self.vertex_marginal.iter().enumerate() {
            s.push_str(&format!("{v},{p:?}\n"));
        }
        s
    }
}

pub fn effective_resistances(g: &WeightedGraph) -> Result<ResistanceTable> {
    effective_resistances_with(g, Execution::default())
}

pub fn effective_resistances_with(g: &WeightedGraph, exec: Execution) -> Result<ResistanceTable> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let lplus = SymEig::new(&g.laplacian())?.pseudoinverse(NULL_SPACE_RTOL);
    let edges = g.edges();
    let resistance = exec.map_range(edges.len(), |k| {
        let e = edges[k];
        lplus[(e.u, e.u)] + lplus[(e.v, e.v)] - 2.0 * lplus[(e.u, e.v)]
    });
    if let Some((k, r)) = resistance.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::Numeric(format!("edge {k} has effective resistance {r}")));
    }
    let total: f64 = edges.iter().zip(&resistance).map(|(e, r)| e.w * r).sum();
    let edge_prob: Vec<f64> = edges.iter().zip(&resistance).map(|(e, r)| e.w * r / total).collect();
    let vertex_marginal = ResistanceTable::marginals_of(g, &edge_prob);
    Ok(ResistanceTable {
        resistance,
        edge_prob,
        vertex_marginal,
        components: g.connected_components().count,
    })
}

/// `|Σ_e w_e R_e − (n − c)|` (Foster's theorem residual).
pub fn foster_check(g: &WeightedGraph, tbl: &ResistanceTable) -> f64 {
    let sum: f64 = g.edges().iter().zip(&tbl.resistance).map(|(e, r)| e.w * r).sum();
    let c = g.connected_components().count;
    (sum - (g.n() - c) as f64).abs()
}
