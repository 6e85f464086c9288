//! Sampling nodes proportionally to a relaxed LP solution.
//!
//! Node `v` is drawn with probability `(x_v + ε) / Σ_u (x_u + ε)` using a
//! prefix-sum array and binary search, so every node, including those with
//! `x_v = 0`, has positive probability.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use rand::Rng;
use thiserror::Error;

use crate::graph::Graph;

pub const DEFAULT_EPSILON: f64 = 0.005;

#[derive(Debug, Error)]
pub enum RelaxedError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("expected {expected} values, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("relaxed solution is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    x: Vec<f64>,
    epsilon: f64,
    prefix: Vec<f64>,
}

impl RelaxedSolution {
    /// Builds the sampler. Values outside `[0, 1]` are clamped; the number
    /// of clamped values is returned alongside.
    pub fn new(mut x: Vec<f64>, epsilon: f64) -> Result<(Self, usize), RelaxedError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(RelaxedError::BadEpsilon(epsilon));
        }
        if x.is_empty() {
            return Err(RelaxedError::Empty);
        }
        let mut clamped = 0;
        for (v, value) in x.iter_mut().enumerate() {
            if value.is_nan() {
                return Err(RelaxedError::Parse {
                    line: 0,
                    msg: format!("value for node {v} is NaN"),
                });
            }
            if !(0.0..=1.0).contains(value) {
                *value = value.clamp(0.0, 1.0);
                clamped += 1;
            }
        }
        let mut acc = 0.0;
        let prefix = x
            .iter()
            .map(|&xv| {
                acc += xv + epsilon;
                acc
            })
            .collect();
        Ok((RelaxedSolution { x, epsilon, prefix }, clamped))
    }

    pub fn load(path: impl AsRef<Path>, g: &Graph, epsilon: f64) -> Result<(Self, usize), RelaxedError> {
        Self::parse(BufReader::new(File::open(path)?), g.node_count(), epsilon)
    }

    /// Accepts either `<node_id> <value>` lines or a bare column of values
    /// in node order; `#` starts a comment.
    pub fn parse<R: BufRead>(reader: R, n: usize, epsilon: f64) -> Result<(Self, usize), RelaxedError> {
        let mut values = vec![f64::NAN; n];
        let mut found = 0usize;
        let mut keyed: Option<bool> = None;

        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let bad = |msg: String| RelaxedError::Parse { line: lineno, msg };
            let this_keyed = match toks.len() {
                1 => false,
                2 => true,
                _ => return Err(bad("expected '<value>' or '<node> <value>'".into())),
            };
            if *keyed.get_or_insert(this_keyed) != this_keyed {
                return Err(bad("mixed keyed and positional lines".into()));
            }
            let (node, raw) = if this_keyed {
                let node: usize = toks[0]
                    .parse()
                    .map_err(|_| bad(format!("invalid node id '{}'", toks[0])))?;
                (node, toks[1])
            } else {
                (found, toks[0])
            };
            let value: f64 = raw.parse().map_err(|_| bad(format!("invalid value '{raw}'")))?;
            if node >= n {
                return Err(RelaxedError::CountMismatch {
                    expected: n,
                    found: node + 1,
                });
            }
            if !values[node].is_nan() {
                return Err(bad(format!("duplicate value for node {node}")));
            }
            values[node] = value;
            found += 1;
        }
        if found != n {
            return Err(RelaxedError::CountMismatch { expected: n, found });
        }
        let (rs, clamped) = Self::new(values, epsilon)?;
        if clamped > 0 {
            log::warn!("{clamped} relaxed value(s) outside [0, 1] were clamped");
        }
        Ok((rs, clamped))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn probability(&self, v: usize) -> f64 {
        (self.x[v] + self.epsilon) / self.total()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_counting(rng).0
    }

    /// Draws a node and also reports how many prefix entries were probed.
    pub fn sample_counting<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, u32) {
        let z = rng.gen_range(0.0..self.total());
        // first index whose prefix sum exceeds z
        let (mut lo, mut hi) = (0usize, self.prefix.len() - 1);
        let mut probes = 0;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            probes += 1;
            if self.prefix[mid] > z {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        (lo, probes)
    }
}
