//! Deterministic graph families.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::sparsifier::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `G(n, p)`.
    Random { n: usize, p: f64 },
    Cycle { n: usize },
    Path { n: usize },
    /// `rows × cols` lattice.
    Grid { rows: usize, cols: usize },
    /// Centre vertex 0.
    Star { n: usize },
    Complete { n: usize },
}

/// Edge weights: unit, or uniform on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightDist {
    #[default]
    Unit,
    Uniform { lo: f64, hi: f64 },
}

impl Family {
    pub fn n(&self) -> usize {
        match *self {
            Family::Random { n, .. } | Family::Cycle { n } | Family::Path { n } | Family::Star { n } | Family::Complete { n } => n,
            Family::Grid { rows, cols } => rows * cols,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Family::Random { p, .. } = *self {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("p must be in [0, 1], got {p}")));
            }
        }
        if let Family::Grid { rows, cols } = *self {
            if rows == 0 || cols == 0 {
                return Err(Error::InvalidParameter("grid sides must be >= 1".into()));
            }
        }
        if self.n() < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {}", self.n())));
        }
        if let Family::Cycle { n } = *self {
            if n < 3 {
                return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
            }
        }
        Ok(())
    }

    fn pairs<R: Rng>(&self, rng: &mut R) -> Vec<(usize, usize)> {
        match *self {
            Family::Random { n, p } => {
                let mut out = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.random_bool(p) {
                            out.push((u, v));
                        }
                    }
                }
                out
            }
            Family::Cycle { n } => (0..n).map(|u| (u, (u + 1) % n)).collect(),
            Family::Path { n } => (1..n).map(|u| (u - 1, u)).collect(),
            Family::Grid { rows, cols } => {
                let id = |r: usize, c: usize| r * cols + c;
                let mut out = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            out.push((id(r, c), id(r, c + 1)));
                        }
                        if r + 1 < rows {
                            out.push((id(r, c), id(r + 1, c)));
                        }
                    }
                }
                out
            }
            Family::Star { n } => (1..n).map(|v| (0, v)).collect(),
            Family::Complete { n } => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
        }
    }
}

pub fn gen_graph(family: Family, weights: WeightDist, seed: u64) -> Result<WeightedGraph> {
    family.validate()?;
    if let WeightDist::Uniform { lo, hi } = weights {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight range must satisfy 0 < lo < hi, got [{lo}, {hi})")));
        }
    }
    let mut rng = rng_from_seed(seed);
    let pairs = family.pairs(&mut rng);
    let edges: Vec<_> = pairs
        .into_iter()
        .map(|(u, v)| {
            let w = match weights {
                WeightDist::Unit => 1.0,
                WeightDist::Uniform { lo, hi } => rng.random_range(lo..hi),
            };
            (u, v, w)
        })
        .collect();
    WeightedGraph::new(family.n(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        let c = gen_graph(Family::Cycle { n: 5 }, WeightDist::Unit, 0).unwrap();
        assert_eq!(c.m(), 5);
        assert!(c.degrees().0.iter().all(|&d| d == 2.0));
        let s = gen_graph(Family::Star { n: 6 }, WeightDist::Unit, 0).unwrap();
        assert_eq!(s.m(), 5);
        assert!(s.edges().iter().all(|e| e.u == 0));
        let k = gen_graph(Family::Random { n: 50, p: 1.0 }, WeightDist::Unit, 7).unwrap();
        assert_eq!(k.m(), 1225);
        let g = gen_graph(Family::Grid { rows: 3, cols: 4 }, WeightDist::Unit, 0).unwrap();
        assert_eq!((g.n(), g.m()), (12, 17));
        assert_eq!(gen_graph(Family::Path { n: 4 }, WeightDist::Unit, 0).unwrap().m(), 3);
    }

    #[test]
    fn invalid() {
        assert!(gen_graph(Family::Random { n: 10, p: 1.5 }, WeightDist::Unit, 0).is_err());
        assert!(gen_graph(Family::Complete { n: 1 }, WeightDist::Unit, 0).is_err());
        assert!(gen_graph(Family::Star { n: 4 }, WeightDist::Uniform { lo: 2.0, hi: 1.0 }, 0).is_err());
    }

    #[test]
    fn seeded() {
        let f = Family::Random { n: 40, p: 0.2 };
        let w = WeightDist::Uniform { lo: 0.5, hi: 2.0 };
        assert_eq!(gen_graph(f, w, 3).unwrap(), gen_graph(f, w, 3).unwrap());
        assert_ne!(gen_graph(f, w, 3).unwrap(), gen_graph(f, w, 4).unwrap());
    }
}
