//! Incrementally maintained companion structure for a current solution `S`.
//!
//! For every node we track `ρ(u) = |N(u) ∩ S|` and, for non-members,
//! `Δ(u) = w(u) − w(N(u) ∩ S)`. Members own their set of 1-tight neighbors
//! (non-members whose only member neighbor is that node) and their mates
//! (members sharing at least one 2-tight neighbor). The shared 2-tight sets
//! are keyed by the normalized pair `(min, max)`.
//!
//! Three candidate pools steer the move engine:
//! * `S⁺` — non-members whose Δ became positive. Entries may go stale and
//!   are filtered when popped.
//! * `S₁` — members whose 1-tight set changed and is non-empty.
//! * `S₂` — mate pairs whose 1-tight or 2-tight surroundings changed.
//!
//! Every mutation of `S` during search goes through [`Interstate::add_member`]
//! and [`Interstate::remove_member`]; multi-node updates are sequences of
//! those.

use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::{FxBuildHasher, FxHashMap};
use thiserror::Error;

use crate::graph::Graph;
use crate::solution::{find_conflict, Solution};

pub type NodeSet = IndexSet<usize, FxBuildHasher>;
pub type MatePair = (usize, usize);
pub type PairSet = IndexSet<MatePair, FxBuildHasher>;

const NONE: usize = usize::MAX;

/// Relative tolerance for Δ comparisons against a rebuild.
pub const DELTA_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InterstateError {
    #[error("solution is not independent: edge ({0}, {1})")]
    NotIndependent(usize, usize),
}

pub fn mate_pair(a: usize, b: usize) -> MatePair {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone)]
pub struct Interstate {
    rho: Vec<u32>,
    delta: Vec<f64>,
    /// Member neighbors of a non-member while `ρ ∈ {1, 2}`.
    anchors: Vec<[usize; 2]>,
    one_tight: Vec<NodeSet>,
    mates: Vec<NodeSet>,
    two_tight: FxHashMap<MatePair, NodeSet>,
    s_plus: NodeSet,
    s_one: NodeSet,
    s_two: PairSet,
}

impl Interstate {
    /// Builds the structure from scratch in `O(n + m)`.
    pub fn build(g: &Graph, s: &Solution) -> Result<Self, InterstateError> {
        if let Some((u, v)) = find_conflict(g, s) {
            return Err(InterstateError::NotIndependent(u, v));
        }
        let n = g.node_count();
        let mut st = Interstate {
            rho: vec![0; n],
            delta: vec![0.0; n],
            anchors: vec![[NONE, NONE]; n],
            one_tight: vec![NodeSet::default(); n],
            mates: vec![NodeSet::default(); n],
            two_tight: FxHashMap::default(),
            s_plus: NodeSet::default(),
            s_one: NodeSet::default(),
            s_two: PairSet::default(),
        };

        for u in g.nodes() {
            if s.contains(u) {
                continue;
            }
            let mut count = 0u32;
            let mut blocked = 0.0;
            let mut anchors = [NONE, NONE];
            for &v in g.neighbors(u) {
                if s.contains(v) {
                    if (count as usize) < 2 {
                        anchors[count as usize] = v;
                    }
                    count += 1;
                    blocked += g.weight(v);
                }
            }
            st.rho[u] = count;
            st.delta[u] = g.weight(u) - blocked;
            if st.delta[u] > 0.0 {
                st.s_plus.insert(u);
            }
            match count {
                1 => {
                    st.anchors[u] = anchors;
                    st.one_tight[anchors[0]].insert(u);
                }
                2 => {
                    let (a, b) = mate_pair(anchors[0], anchors[1]);
                    st.anchors[u] = [a, b];
                    st.link_two_tight(a, b, u);
                }
                _ => {}
            }
        }
        for v in g.nodes() {
            if s.contains(v) && !st.one_tight[v].is_empty() {
                st.s_one.insert(v);
            }
        }
        Ok(st)
    }

    pub fn rho(&self, u: usize) -> u32 {
        self.rho[u]
    }

    /// Maintained Δ(u); meaningful only for non-members.
    pub fn delta(&self, u: usize) -> f64 {
        self.delta[u]
    }

    pub fn one_tight(&self, v: usize) -> &NodeSet {
        &self.one_tight[v]
    }

    pub fn mates(&self, v: usize) -> &NodeSet {
        &self.mates[v]
    }

    pub fn two_tight(&self, a: usize, b: usize) -> Option<&NodeSet> {
        self.two_tight.get(&mate_pair(a, b))
    }

    pub fn mate_pair_count(&self) -> usize {
        self.two_tight.len()
    }

    pub fn s_plus(&self) -> &NodeSet {
        &self.s_plus
    }

    pub fn s_one(&self) -> &NodeSet {
        &self.s_one
    }

    pub fn s_two(&self) -> &PairSet {
        &self.s_two
    }

    /// The unique member neighbor of a 1-tight node.
    pub fn tight_owner(&self, x: usize) -> Option<usize> {
        (self.rho[x] == 1).then(|| self.anchors[x][0])
    }

    pub fn pop_s_plus<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        pop_random(&mut self.s_plus, rng)
    }

    pub fn pop_s_one<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        pop_random(&mut self.s_one, rng)
    }

    pub fn pop_s_two<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<MatePair> {
        if self.s_two.is_empty() {
            return None;
        }
        let idx = rng.gen_range(0..self.s_two.len());
        self.s_two.swap_remove_index(idx)
    }

    /// Recomputes Δ(u) exactly from the edge list and stores it.
    pub fn resync_delta(&mut self, g: &Graph, s: &Solution, u: usize) -> f64 {
        let blocked: f64 = g
            .neighbors(u)
            .iter()
            .filter(|&&v| s.contains(v))
            .map(|&v| g.weight(v))
            .sum();
        self.delta[u] = g.weight(u) - blocked;
        self.delta[u]
    }

    /// Adds `u` to `S`. Panics if a neighbor of `u` is already a member.
    pub fn add_member(&mut self, g: &Graph, s: &mut Solution, u: usize) {
        assert!(!s.contains(u), "node {u} is already a member");
        assert_eq!(self.rho[u], 0, "adding {u} would break independence");
        s.insert(g, u);
        self.s_plus.swap_remove(&u);
        self.anchors[u] = [NONE, NONE];
        let wu = g.weight(u);

        for &x in g.neighbors(u) {
            self.rho[x] += 1;
            self.delta[x] -= wu;
            match self.rho[x] {
                1 => {
                    self.anchors[x] = [u, NONE];
                    self.one_tight[u].insert(x);
                }
                2 => {
                    let owner = self.anchors[x][0];
                    self.drop_one_tight(owner, x);
                    let (a, b) = mate_pair(owner, u);
                    self.anchors[x] = [a, b];
                    self.link_two_tight(a, b, x);
                }
                3 => {
                    let [a, b] = self.anchors[x];
                    self.anchors[x] = [NONE, NONE];
                    self.unlink_two_tight(a, b, x);
                }
                _ => {}
            }
        }
        if !self.one_tight[u].is_empty() {
            self.one_tight_grew(u);
        }
    }

    /// Removes `v` from `S`. Panics if `v` is not a member.
    pub fn remove_member(&mut self, g: &Graph, s: &mut Solution, v: usize) {
        assert!(s.contains(v), "node {v} is not a member");
        s.remove(g, v);

        self.one_tight[v].clear();
        self.s_one.swap_remove(&v);
        let mates = std::mem::take(&mut self.mates[v]);
        for &m in &mates {
            let key = mate_pair(v, m);
            self.two_tight.remove(&key);
            self.mates[m].swap_remove(&v);
            self.s_two.swap_remove(&key);
        }

        // members are never adjacent, so N(v) ∩ S is empty now
        debug_assert_eq!(self.rho[v], 0);
        if self.resync_delta(g, s, v) > 0.0 {
            self.s_plus.insert(v);
        }

        let wv = g.weight(v);
        for &x in g.neighbors(v) {
            self.rho[x] -= 1;
            self.delta[x] += wv;
            if self.delta[x] > 0.0 {
                self.s_plus.insert(x);
            }
            match self.rho[x] {
                0 => self.anchors[x] = [NONE, NONE],
                1 => {
                    // the pair {v, other} was dissolved with v's mates above
                    let [a, b] = self.anchors[x];
                    let other = if a == v { b } else { a };
                    self.anchors[x] = [other, NONE];
                    self.one_tight[other].insert(x);
                    self.one_tight_grew(other);
                }
                2 => {
                    let mut found = [NONE, NONE];
                    let mut k = 0;
                    for &y in g.neighbors(x) {
                        if s.contains(y) {
                            found[k] = y;
                            k += 1;
                            if k == 2 {
                                break;
                            }
                        }
                    }
                    let (a, b) = mate_pair(found[0], found[1]);
                    self.anchors[x] = [a, b];
                    self.link_two_tight(a, b, x);
                }
                _ => {}
            }
        }
    }

    fn link_two_tight(&mut self, a: usize, b: usize, x: usize) {
        let key = (a, b);
        let set = self.two_tight.entry(key).or_default();
        let fresh = set.is_empty();
        set.insert(x);
        if fresh {
            // idempotent: re-creating an existing mate link is harmless
            self.mates[a].insert(b);
            self.mates[b].insert(a);
        }
        self.s_two.insert(key);
    }

    fn unlink_two_tight(&mut self, a: usize, b: usize, x: usize) {
        let key = (a, b);
        let Some(set) = self.two_tight.get_mut(&key) else {
            return;
        };
        set.swap_remove(&x);
        if set.is_empty() {
            self.two_tight.remove(&key);
            self.mates[a].swap_remove(&b);
            self.mates[b].swap_remove(&a);
            self.s_two.swap_remove(&key);
        } else {
            self.s_two.insert(key);
        }
    }

    fn one_tight_grew(&mut self, v: usize) {
        self.s_one.insert(v);
        self.mark_mates_dirty(v);
    }

    fn drop_one_tight(&mut self, owner: usize, x: usize) {
        self.one_tight[owner].swap_remove(&x);
        if self.one_tight[owner].is_empty() {
            self.s_one.swap_remove(&owner);
        } else {
            // a shrunken set can change the best (1,*) replacement
            self.s_one.insert(owner);
        }
        self.mark_mates_dirty(owner);
    }

    fn mark_mates_dirty(&mut self, v: usize) {
        for &m in &self.mates[v] {
            self.s_two.insert(mate_pair(v, m));
        }
    }

    /// Compares against a from-scratch rebuild. Set contents must match
    /// exactly, Δ within [`DELTA_TOLERANCE`] relative, and `S⁺` must contain
    /// every non-member with positive Δ.
    pub fn check_against_rebuild(&self, g: &Graph, s: &Solution) -> Result<(), String> {
        let fresh = Interstate::build(g, s).map_err(|e| e.to_string())?;
        for u in g.nodes() {
            if self.rho[u] != fresh.rho[u] {
                return Err(format!("rho({u}) = {} but rebuild has {}", self.rho[u], fresh.rho[u]));
            }
            if s.contains(u) {
                if !same_set(&self.one_tight[u], &fresh.one_tight[u]) {
                    return Err(format!("one_tight({u}) differs"));
                }
                if !same_set(&self.mates[u], &fresh.mates[u]) {
                    return Err(format!("mates({u}) differ"));
                }
            } else {
                if !self.one_tight[u].is_empty() || !self.mates[u].is_empty() {
                    return Err(format!("non-member {u} owns tight/mate entries"));
                }
                let blocked = g.weight(u) - fresh.delta[u];
                let scale = (g.weight(u).abs() + blocked.abs()).max(1.0);
                if (self.delta[u] - fresh.delta[u]).abs() > DELTA_TOLERANCE * scale {
                    return Err(format!(
                        "delta({u}) = {} but rebuild has {}",
                        self.delta[u], fresh.delta[u]
                    ));
                }
                if fresh.delta[u] > 0.0 && !self.s_plus.contains(&u) {
                    return Err(format!("S+ misses {u} with delta {}", fresh.delta[u]));
                }
            }
        }
        if self.two_tight.len() != fresh.two_tight.len() {
            return Err(format!(
                "{} mate pairs but rebuild has {}",
                self.two_tight.len(),
                fresh.two_tight.len()
            ));
        }
        for (key, set) in &fresh.two_tight {
            match self.two_tight.get(key) {
                Some(mine) if same_set(mine, set) => {}
                _ => return Err(format!("two_tight{key:?} differs")),
            }
        }
        Ok(())
    }

    pub fn verify_against_rebuild(&self, g: &Graph, s: &Solution) -> bool {
        self.check_against_rebuild(g, s).is_ok()
    }
}

fn same_set(a: &NodeSet, b: &NodeSet) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

fn pop_random<R: Rng + ?Sized>(set: &mut NodeSet, rng: &mut R) -> Option<usize> {
    if set.is_empty() {
        return None;
    }
    let idx = rng.gen_range(0..set.len());
    set.swap_remove_index(idx)
}
