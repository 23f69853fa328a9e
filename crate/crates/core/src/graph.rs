//! Undirected weighted graphs and their derived dense matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::Index;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A simple undirected graph with strictly positive edge weights.
///
/// Edges are kept in canonical form `u < v`, sorted, with duplicates merged
/// by summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("vertex count must be at least 1".into()));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) has weight {w}")));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let edges = merged.into_iter().map(|((u, v), w)| Edge { u, v, w }).collect();
        Ok(Self { n, edges })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weighted degrees `D_ii = Σ_j A_ij`.
    pub fn degrees(&self) -> DegreeDiagonal {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        DegreeDiagonal(d)
    }

    /// Unweighted neighbour counts.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> DenseSymMatrix {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.u, e.v)] = e.w;
            a[(e.v, e.u)] = e.w;
        }
        DenseSymMatrix(a)
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DenseSymMatrix {
        let d = self.degrees();
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.v)] = -e.w;
            l[(e.v, e.u)] = -e.w;
        }
        for (i, di) in d.0.iter().enumerate() {
            l[(i, i)] = *di;
        }
        DenseSymMatrix(l)
    }

    /// Edge-vertex incidence with rows `+√w` at `u` and `-√w` at `v`.
    pub fn incidence(&self) -> IncidenceMatrix {
        let mut b = DMatrix::zeros(self.m(), self.n);
        for (k, e) in self.edges.iter().enumerate() {
            let s = e.w.sqrt();
            b[(k, e.u)] = s;
            b[(k, e.v)] = -s;
        }
        IncidenceMatrix(b)
    }

    pub fn connected_components(&self) -> Components {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut labels = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if labels[s] != usize::MAX {
                continue;
            }
            labels[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if labels[y] == usize::MAX {
                        labels[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        Components { count, labels }
    }

    /// Parse the edge-list text format: a header `n m`, then `m` lines
    /// `u v w`. Lines starting with `#` are skipped.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            let parse_err = |msg: String| Error::Parse { line: lineno, msg };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(parse_err(format!("expected `n m`, got {t:?}")));
                    }
                    let n = fields[0].parse().map_err(|e| parse_err(format!("n: {e}")))?;
                    let m = fields[1].parse().map_err(|e| parse_err(format!("m: {e}")))?;
                    header = Some((n, m));
                }
                Some(_) => {
                    if fields.len() != 3 {
                        return Err(parse_err(format!("expected `u v w`, got {t:?}")));
                    }
                    let u: usize = fields[0].parse().map_err(|e| parse_err(format!("u: {e}")))?;
                    let v: usize = fields[1].parse().map_err(|e| parse_err(format!("v: {e}")))?;
                    let w: f64 = fields[2].parse().map_err(|e| parse_err(format!("w: {e}")))?;
                    edges.push((u, v, w));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            // `{:?}` on f64 is the shortest round-trip representation.
            let _ = writeln!(s, "{} {} {:?}", e.u, e.v, e.w);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

/// Dense symmetric real matrix. Only constructed symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix(DMatrix<f64>);

impl DenseSymMatrix {
    /// Symmetrizes `m` as `(m + mᵀ)/2`; exactly symmetric afterwards.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let mut out = m.clone();
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                let s = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        Ok(Self(out))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for DenseSymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDiagonal(pub Vec<f64>);

impl DegreeDiagonal {
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_matrix(&self) -> DenseSymMatrix {
        DenseSymMatrix::from_diagonal(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix(DMatrix<f64>);

impl IncidenceMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `BᵀB`, which equals the Laplacian.
    pub fn gram(&self) -> DenseSymMatrix {
        DenseSymMatrix::from_matrix(self.0.transpose() * &self.0).expect("square by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_laplacian() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let l = g.laplacian();
        assert_eq!(l.as_matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn triangle_laplacian() {
        let l = triangle().laplacian();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn star_laplacian_diagonal() {
        let g = WeightedGraph::new(5, (1..5).map(|i| (0, i, 1.0))).unwrap();
        let l = g.laplacian();
        assert_eq!(l[(0, 0)], 4.0);
        for i in 1..5 {
            assert_eq!(l[(i, i)], 1.0);
        }
    }

    #[test]
    fn adjacency_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(g.adjacency().as_matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(WeightedGraph::empty(3).unwrap().adjacency().max_abs(), 0.0);
        let p = WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let a = p.adjacency();
        assert_eq!((a[(0, 1)], a[(1, 2)], a[(0, 2)]), (2.0, 3.0, 0.0));
    }

    #[test]
    fn incidence_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let b = g.incidence();
        assert_eq!(b.as_matrix()[(0, 0)].abs(), 1.0);
        assert_eq!(b.as_matrix()[(0, 0)], -b.as_matrix()[(0, 1)]);
        assert_eq!(b.gram(), g.laplacian());

        let t = triangle();
        assert_eq!(t.incidence().gram(), t.laplacian());

        let h = WeightedGraph::new(2, [(0, 1, 4.0)]).unwrap();
        let row = h.incidence();
        assert_eq!(row.as_matrix()[(0, 0)].abs(), 2.0);
        assert_eq!(row.as_matrix()[(0, 1)].abs(), 2.0);
    }

    #[test]
    fn components() {
        assert_eq!(triangle().connected_components().count, 1);
        let two = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let c = two.connected_components();
        assert_eq!(c.count, 2);
        assert_eq!(c.labels[0], c.labels[1]);
        assert_ne!(c.labels[1], c.labels[2]);
        assert_eq!(WeightedGraph::empty(5).unwrap().connected_components().count, 5);
    }

    #[test]
    fn duplicate_edges_merge() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 0, 2.5), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges()[0], Edge { u: 0, v: 1, w: 3.5 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WeightedGraph::new(0, []).is_err());
        assert!(WeightedGraph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (2, 3, 1.0 / 3.0), (1, 2, 7.0)]).unwrap();
        let text = g.to_edge_list();
        let back = WeightedGraph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_comments_and_errors() {
        let text = "# a comment\n3 2\n0 1 1.5\n# mid\n1 2 2\n";
        let g = WeightedGraph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.m(), 2);
        assert!(WeightedGraph::read_edge_list("3 2\n0 1 1\n".as_bytes()).is_err());
        assert!(WeightedGraph::read_edge_list("3 1\n0 1 x\n".as_bytes()).is_err());
        assert!(WeightedGraph::read_edge_list("".as_bytes()).is_err());
    }
}
