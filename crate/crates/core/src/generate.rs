//! Synthetic instances: G(n,p), paths, cycles, stars and grids.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::graph::Graph;
use crate::SolverRng;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Gnp { n: usize, p: f64 },
    Path { n: usize },
    Cycle { n: usize },
    /// Node 0 is the centre.
    Star { n: usize },
    /// Row-major node numbering.
    Grid { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    /// Integers drawn uniformly from `lo..=hi`.
    UniformInt { lo: u64, hi: u64 },
    /// `w(v) = v mod c`, the usual convention for unweighted benchmarks.
    /// Node IDs divisible by `c` would get weight 0.
    IdMod { c: u64 },
}

impl Default for WeightRule {
    fn default() -> Self {
        WeightRule::UniformInt { lo: 1, hi: 200 }
    }
}

impl FromStr for WeightRule {
    type Err = GenError;

    /// `uniform:LO:HI` or `id-mod:C` (`id-mod` alone means C = 200).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| GenError::Invalid(format!("'{t}' is not a non-negative integer")))
        };
        match parts.as_slice() {
            ["uniform" | "uniform-int", lo, hi] => Ok(WeightRule::UniformInt { lo: num(lo)?, hi: num(hi)? }),
            ["id-mod"] => Ok(WeightRule::IdMod { c: 200 }),
            ["id-mod", c] => Ok(WeightRule::IdMod { c: num(c)? }),
            _ => Err(GenError::Invalid(format!(
                "weight rule '{s}' (expected uniform:LO:HI or id-mod[:C])"
            ))),
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::UniformInt { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            WeightRule::IdMod { c } => write!(f, "id-mod:{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub model: Model,
    pub weights: WeightRule,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        match self.model {
            Model::Gnp { p, .. } if !(0.0..=1.0).contains(&p) => {
                return Err(GenError::Invalid(format!("edge probability {p} outside [0, 1]")))
            }
            Model::Cycle { n } if n < 3 => return Err(GenError::Invalid("a cycle needs at least 3 nodes".into())),
            Model::Star { n } if n < 1 => return Err(GenError::Invalid("a star needs a centre".into())),
            _ => {}
        }
        match self.weights {
            WeightRule::UniformInt { lo, hi } if lo > hi => {
                Err(GenError::Invalid(format!("empty weight range {lo}..={hi}")))
            }
            WeightRule::IdMod { c: 0 } => Err(GenError::Invalid("modulus must be positive".into())),
            _ => Ok(()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self.model {
            Model::Gnp { n, .. } | Model::Path { n } | Model::Cycle { n } | Model::Star { n } => n,
            Model::Grid { rows, cols } => rows * cols,
        }
    }

    /// Builds the instance; equal specs give equal graphs.
    pub fn generate(&self) -> Result<Graph, GenError> {
        self.validate()?;
        let mut rng = SolverRng::seed_from_u64(self.seed);
        let n = self.node_count();
        let edges = match self.model {
            Model::Gnp { n, p } => gnp_edges(n, p, &mut rng),
            Model::Path { n } => (1..n).map(|v| (v - 1, v)).collect(),
            Model::Cycle { n } => (0..n).map(|v| (v, (v + 1) % n)).collect(),
            Model::Star { n } => (1..n).map(|v| (0, v)).collect(),
            Model::Grid { rows, cols } => {
                let mut e = Vec::with_capacity(2 * rows * cols);
                for r in 0..rows {
                    for c in 0..cols {
                        let v = r * cols + c;
                        if c + 1 < cols {
                            e.push((v, v + 1));
                        }
                        if r + 1 < rows {
                            e.push((v, v + cols));
                        }
                    }
                }
                e
            }
        };
        let weights = (0..n)
            .map(|v| match self.weights {
                WeightRule::UniformInt { lo, hi } => rng.gen_range(lo..=hi) as f64,
                WeightRule::IdMod { c } => (v as u64 % c) as f64,
            })
            .collect();
        let (g, _) = Graph::from_edges(weights, edges).map_err(|e| GenError::Invalid(e.to_string()))?;
        Ok(g)
    }
}

/// G(n,p) edges by geometric skipping over the lower triangle, `O(n + m)`.
fn gnp_edges<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for v in 1..n {
            edges.extend((0..v).map(|w| (w, v)));
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(model: Model, weights: WeightRule) -> GenSpec {
        GenSpec { model, weights, seed: 7 }
    }

    #[test]
    fn path_has_two_edges() {
        let g = instance(Model::Path { n: 3 }, WeightRule::default()).generate().unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.is_edge(0, 1) && g.is_edge(1, 2) && !g.is_edge(0, 2));
        assert!(g.weights().iter().all(|&w| (1.0..=200.0).contains(&w) && w.fract() == 0.0));
    }

    #[test]
    fn id_mod_weights() {
        let g = instance(Model::Path { n: 406 }, WeightRule::IdMod { c: 200 }).generate().unwrap();
        assert_eq!(g.weight(405), 5.0);
        assert_eq!(g.weight(199), 199.0);
        assert_eq!(g.weight(200), 0.0);
    }

    #[test]
    fn shapes() {
        let c = instance(Model::Cycle { n: 5 }, WeightRule::default()).generate().unwrap();
        assert_eq!(c.edge_count(), 5);
        assert!(c.is_edge(4, 0));
        let s = instance(Model::Star { n: 6 }, WeightRule::default()).generate().unwrap();
        assert_eq!((s.degree(0), s.edge_count()), (5, 5));
        let g = instance(Model::Grid { rows: 3, cols: 4 }, WeightRule::default()).generate().unwrap();
        assert_eq!(g.edge_count(), 3 * 3 + 2 * 4);
        assert!(g.is_edge(1, 5) && !g.is_edge(3, 4));
    }

    #[test]
    fn same_seed_same_graph() {
        let s = instance(Model::Gnp { n: 300, p: 0.05 }, WeightRule::default());
        assert_eq!(s.generate().unwrap(), s.generate().unwrap());
        let other = GenSpec { seed: 8, ..s };
        assert_ne!(s.generate().unwrap(), other.generate().unwrap());
    }

    #[test]
    fn gnp_edge_density() {
        let g = instance(Model::Gnp { n: 2000, p: 0.01 }, WeightRule::default()).generate().unwrap();
        let expected = 0.01 * 2000.0 * 1999.0 / 2.0;
        let sd = (expected * 0.99f64).sqrt();
        assert!((g.edge_count() as f64 - expected).abs() < 5.0 * sd, "m = {}", g.edge_count());
        let full = instance(Model::Gnp { n: 10, p: 1.0 }, WeightRule::default()).generate().unwrap();
        assert_eq!(full.edge_count(), 45);
        let empty = instance(Model::Gnp { n: 10, p: 0.0 }, WeightRule::default()).generate().unwrap();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn weight_rule_parsing() {
        assert_eq!("uniform:1:200".parse::<WeightRule>().unwrap(), WeightRule::UniformInt { lo: 1, hi: 200 });
        assert_eq!("id-mod".parse::<WeightRule>().unwrap(), WeightRule::IdMod { c: 200 });
        assert_eq!("id-mod:7".parse::<WeightRule>().unwrap().to_string(), "id-mod:7");
        assert!("gaussian".parse::<WeightRule>().is_err());
        assert!("uniform:5".parse::<WeightRule>().is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(instance(Model::Gnp { n: 5, p: 1.5 }, WeightRule::default()).generate().is_err());
        assert!(instance(Model::Cycle { n: 2 }, WeightRule::default()).generate().is_err());
        assert!(instance(Model::Path { n: 3 }, WeightRule::UniformInt { lo: 5, hi: 1 }).generate().is_err());
        assert!(instance(Model::Path { n: 3 }, WeightRule::IdMod { c: 0 }).generate().is_err());
    }
}
