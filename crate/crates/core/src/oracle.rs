//! Exact maximum-weight independent sets for small graphs.
//!
//! Used to verify the heuristics. Graphs are encoded as 64-bit adjacency
//! masks, which caps the size at [`MAX_EXACT_NODES`].

use thiserror::Error;

use crate::graph::Graph;

pub const MAX_EXACT_NODES: usize = 30;
pub const MAX_ENUMERATION_NODES: usize = 20;
pub const MAX_SUBSET_SIZE: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} nodes; exact solving is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("conflict ({0}, {1}) references an element outside the pool")]
    BadConflict(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub weight: f64,
    /// Optimal set, ascending node IDs.
    pub witness: Vec<usize>,
    /// Search nodes (branch-and-bound calls or enumerated subsets).
    pub explored: u64,
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    g.nodes()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect()
}

fn mask_nodes(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

fn mask_weight(weights: &[f64], mask: u64) -> f64 {
    mask_nodes(mask).into_iter().map(|v| weights[v]).sum()
}

/// Branch and bound on the highest-degree remaining node with the bound
/// "current weight + all remaining weight".
pub fn exact_mwis(g: &Graph) -> Result<ExactResult, OracleError> {
    let n = g.node_count();
    if n > MAX_EXACT_NODES {
        return Err(OracleError::TooLarge {
            n,
            limit: MAX_EXACT_NODES,
        });
    }
    let mut search = BranchAndBound {
        weights: g.weights(),
        adj: adjacency_masks(g),
        best_weight: f64::NEG_INFINITY,
        best_mask: 0,
        explored: 0,
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.branch(all, 0, 0.0);
    let witness = mask_nodes(search.best_mask);
    Ok(ExactResult {
        weight: mask_weight(g.weights(), search.best_mask),
        witness,
        explored: search.explored,
    })
}

struct BranchAndBound<'a> {
    weights: &'a [f64],
    adj: Vec<u64>,
    best_weight: f64,
    best_mask: u64,
    explored: u64,
}

impl BranchAndBound<'_> {
    fn branch(&mut self, remaining: u64, chosen: u64, weight: f64) {
        self.explored += 1;
        let rest = mask_weight(self.weights, remaining);
        if weight + rest <= self.best_weight {
            return;
        }
        let mut pivot = None;
        let mut pivot_degree = 0;
        let mut bits = remaining;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = (self.adj[v] & remaining).count_ones();
            if pivot.is_none() || d > pivot_degree {
                pivot = Some(v);
                pivot_degree = d;
            }
        }
        let Some(v) = pivot else {
            self.best_weight = weight;
            self.best_mask = chosen;
            return;
        };
        if pivot_degree == 0 {
            // all remaining nodes are isolated: take them all
            self.best_weight = weight + rest;
            self.best_mask = chosen | remaining;
            return;
        }
        let bit = 1u64 << v;
        self.branch(remaining & !bit & !self.adj[v], chosen | bit, weight + self.weights[v]);
        self.branch(remaining & !bit, chosen, weight);
    }
}

/// Full `2^n` enumeration; a cross-check for [`exact_mwis`].
pub fn exact_mwis_enumerate(g: &Graph) -> Result<ExactResult, OracleError> {
    let n = g.node_count();
    if n > MAX_ENUMERATION_NODES {
        return Err(OracleError::TooLarge {
            n,
            limit: MAX_ENUMERATION_NODES,
        });
    }
    let adj = adjacency_masks(g);
    let mut best = (f64::NEG_INFINITY, 0u64);
    for mask in 0u64..(1 << n) {
        let independent = mask_nodes(mask).iter().all(|&v| adj[v] & mask == 0);
        if independent {
            let w = mask_weight(g.weights(), mask);
            if w > best.0 {
                best = (w, mask);
            }
        }
    }
    Ok(ExactResult {
        weight: best.0,
        witness: mask_nodes(best.1),
        explored: 1 << n,
    })
}

/// Heaviest independent subset of a small candidate pool given as weights
/// and per-element conflict masks. Branches on the lowest-index remaining
/// element: take it (dropping its conflicts) or skip it; ties favor taking.
pub(crate) fn max_weight_subset(weights: &[f64], conflicts: &[u32]) -> (f64, u32) {
    debug_assert!(weights.len() <= MAX_SUBSET_SIZE);
    let all = if weights.is_empty() {
        0
    } else {
        u32::MAX >> (32 - weights.len())
    };
    subset_rec(weights, conflicts, all)
}

fn subset_rec(weights: &[f64], conflicts: &[u32], remaining: u32) -> (f64, u32) {
    if remaining == 0 {
        return (0.0, 0);
    }
    let v = remaining.trailing_zeros() as usize;
    let bit = 1u32 << v;
    let (take_w, take_m) = subset_rec(weights, conflicts, remaining & !bit & !conflicts[v]);
    let (skip_w, skip_m) = subset_rec(weights, conflicts, remaining & !bit);
    if take_w + weights[v] >= skip_w {
        (take_w + weights[v], take_m | bit)
    } else {
        (skip_w, skip_m)
    }
}

/// Exact heaviest independent subset of a pool of at most
/// [`MAX_SUBSET_SIZE`] elements. Returns the weight and ascending indices.
pub fn exact_subset(weights: &[f64], conflicts: &[(usize, usize)]) -> Result<(f64, Vec<usize>), OracleError> {
    let k = weights.len();
    if k > MAX_SUBSET_SIZE {
        return Err(OracleError::TooLarge {
            n: k,
            limit: MAX_SUBSET_SIZE,
        });
    }
    let mut masks = vec![0u32; k];
    for &(a, b) in conflicts {
        if a >= k || b >= k {
            return Err(OracleError::BadConflict(a, b));
        }
        if a != b {
            masks[a] |= 1 << b;
            masks[b] |= 1 << a;
        }
    }
    let (_, mask) = max_weight_subset(weights, &masks);
    let chosen: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
    let weight = chosen.iter().map(|&i| weights[i]).sum();
    Ok((weight, chosen))
}
