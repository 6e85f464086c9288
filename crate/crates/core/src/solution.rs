//! Independent sets over a [`Graph`], plus validation, maximalization and
//! the zero-gain equivalence test.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::Graph;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node id {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("solution is not independent: edge ({0}, {1}) has both endpoints in the set")]
    NotIndependent(usize, usize),
}

/// A node set with O(1) membership, insertion and removal.
///
/// Members are kept in a dense list (swap-remove on deletion) so they can be
/// iterated without scanning all `n` flags. The total weight is cached and
/// maintained incrementally; [`Solution::refresh_weight`] re-sums it in
/// ascending node order so that equal sets always carry bitwise-equal weights.
#[derive(Debug, Clone)]
pub struct Solution {
    member: Vec<bool>,
    list: Vec<usize>,
    pos: Vec<usize>,
    weight: f64,
}

impl PartialEq for Solution {
    fn eq(&self, other: &Self) -> bool {
        self.member == other.member
    }
}

impl Eq for Solution {}

impl Solution {
    pub fn empty(n: usize) -> Self {
        Solution {
            member: vec![false; n],
            list: Vec::new(),
            pos: vec![ABSENT; n],
            weight: 0.0,
        }
    }

    /// Builds a set from node IDs. Independence is not checked here.
    pub fn from_nodes(g: &Graph, nodes: impl IntoIterator<Item = usize>) -> Result<Self, SolutionError> {
        let n = g.node_count();
        let mut s = Solution::empty(n);
        for v in nodes {
            if v >= n {
                return Err(SolutionError::NodeOutOfRange { node: v, n });
            }
            s.insert(g, v);
        }
        s.refresh_weight(g);
        Ok(s)
    }

    pub fn node_count(&self) -> usize {
        self.member.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member[v]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Members in unspecified (but deterministic) order.
    pub fn members(&self) -> &[usize] {
        &self.list
    }

    pub fn sorted_members(&self) -> Vec<usize> {
        let mut out = self.list.clone();
        out.sort_unstable();
        out
    }

    pub fn flags(&self) -> &[bool] {
        &self.member
    }

    /// Adds `v`; returns false if it was already a member.
    pub fn insert(&mut self, g: &Graph, v: usize) -> bool {
        if self.member[v] {
            return false;
        }
        self.member[v] = true;
        self.pos[v] = self.list.len();
        self.list.push(v);
        self.weight += g.weight(v);
        true
    }

    /// Removes `v`; returns false if it was not a member.
    pub fn remove(&mut self, g: &Graph, v: usize) -> bool {
        if !self.member[v] {
            return false;
        }
        self.member[v] = false;
        let idx = self.pos[v];
        self.list.swap_remove(idx);
        if let Some(&moved) = self.list.get(idx) {
            self.pos[moved] = idx;
        }
        self.pos[v] = ABSENT;
        self.weight -= g.weight(v);
        true
    }

    /// Sum of member weights in ascending node order.
    pub fn canonical_weight(&self, g: &Graph) -> f64 {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| g.weight(v))
            .sum()
    }

    pub fn refresh_weight(&mut self, g: &Graph) -> f64 {
        self.weight = self.canonical_weight(g);
        self.weight
    }

    pub fn symmetric_difference_len(&self, other: &Solution) -> usize {
        self.member
            .iter()
            .zip(&other.member)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Number of members adjacent to `v`.
    pub fn member_neighbors(&self, g: &Graph, v: usize) -> usize {
        g.neighbors(v).iter().filter(|&&u| self.member[u]).count()
    }

    pub fn write<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "# {} nodes, weight {:?}", self.len(), self.weight)?;
        for v in self.sorted_members() {
            writeln!(out, "{v}")?;
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.write(File::create(path)?)
    }

    /// Reads a solution file and checks it is an independent set of `g`.
    pub fn load(path: impl AsRef<Path>, g: &Graph) -> Result<Self, SolutionError> {
        parse_solution(BufReader::new(File::open(path)?), g)
    }
}

/// Parses one node ID per line (`#` comments) and validates independence.
pub fn parse_solution<R: BufRead>(reader: R, g: &Graph) -> Result<Solution, SolutionError> {
    let mut nodes = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let v: usize = content.parse().map_err(|_| SolutionError::Parse {
            line: idx + 1,
            msg: format!("invalid node id '{content}'"),
        })?;
        nodes.push(v);
    }
    let s = Solution::from_nodes(g, nodes)?;
    if let Some((u, v)) = find_conflict(g, &s) {
        return Err(SolutionError::NotIndependent(u, v));
    }
    Ok(s)
}

/// First edge with both endpoints in `s`, if any.
pub fn find_conflict(g: &Graph, s: &Solution) -> Option<(usize, usize)> {
    s.members().iter().find_map(|&u| {
        g.neighbors(u)
            .iter()
            .find(|&&v| s.contains(v))
            .map(|&v| (u.min(v), u.max(v)))
    })
}

pub fn is_independent(g: &Graph, s: &Solution) -> bool {
    find_conflict(g, s).is_none()
}

/// Nodes outside `s` with no neighbor in `s`.
pub fn free_nodes(g: &Graph, s: &Solution) -> Vec<usize> {
    g.nodes()
        .filter(|&v| !s.contains(v) && g.neighbors(v).iter().all(|&u| !s.contains(u)))
        .collect()
}

pub fn is_maximal(g: &Graph, s: &Solution) -> bool {
    g.nodes()
        .all(|v| s.contains(v) || g.neighbors(v).iter().any(|&u| s.contains(u)))
}

/// Inserts free nodes in uniformly random order until none remain.
pub fn make_maximal<R: Rng + ?Sized>(g: &Graph, s: &mut Solution, rng: &mut R) {
    let mut free = free_nodes(g, s);
    free.shuffle(rng);
    for v in free {
        if g.neighbors(v).iter().all(|&u| !s.contains(u)) {
            s.insert(g, v);
        }
    }
}

/// Bounded test for transformability of `s1` into `s2` by zero-gain
/// `(*,1)` and `(1,*)` moves.
///
/// Only moves that shrink the symmetric difference are tried, first match
/// wins, and at most `move_budget` moves are applied (default
/// `2·|s1 △ s2|`). A `true` answer is always backed by an explicit move
/// sequence; `false` may be a miss.
pub fn solutions_equivalent(g: &Graph, s1: &Solution, s2: &Solution, move_budget: Option<usize>) -> bool {
    if s1 == s2 {
        return true;
    }
    if s1.canonical_weight(g) != s2.canonical_weight(g) {
        return false;
    }
    let budget = move_budget.unwrap_or(2 * s1.symmetric_difference_len(s2));
    let mut cur = s1.clone();

    for _ in 0..budget {
        if cur == *s2 {
            return true;
        }
        if !apply_zero_gain_step(g, &mut cur, s2) {
            return false;
        }
    }
    cur == *s2
}

fn apply_zero_gain_step(g: &Graph, cur: &mut Solution, target: &Solution) -> bool {
    // (*,1): bring in a target node, evicting its current neighbors
    for v in target.sorted_members() {
        if cur.contains(v) {
            continue;
        }
        let evicted: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| cur.contains(u)).collect();
        let out: f64 = evicted.iter().map(|&u| g.weight(u)).sum();
        if out == g.weight(v) {
            for u in evicted {
                cur.remove(g, u);
            }
            cur.insert(g, v);
            return true;
        }
    }
    // (1,*): drop a non-target node, admitting target neighbors it alone blocked
    for v in cur.sorted_members() {
        if target.contains(v) {
            continue;
        }
        let admitted: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| target.contains(u) && !cur.contains(u))
            .filter(|&u| g.neighbors(u).iter().all(|&x| x == v || !cur.contains(x)))
            .collect();
        let gained: f64 = admitted.iter().map(|&u| g.weight(u)).sum();
        if gained == g.weight(v) {
            cur.remove(g, v);
            for u in admitted {
                cur.insert(g, u);
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(vec![3.0, 5.0, 3.0], [(0, 1), (1, 2)]).unwrap().0
    }

    fn cycle4() -> Graph {
        Graph::from_edges(vec![1.0; 4], [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap().0
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let weights = (0..n).map(|_| rng.gen_range(1..=50) as f64).collect();
        Graph::from_edges(weights, edges).unwrap().0
    }

    #[test]
    fn independence_checks() {
        let g = path3();
        assert!(is_independent(&g, &Solution::from_nodes(&g, [0, 2]).unwrap()));
        assert!(!is_independent(&g, &Solution::from_nodes(&g, [0, 1]).unwrap()));
        assert!(is_independent(&g, &Solution::empty(3)));
    }

    #[test]
    fn insert_remove_keep_weight_and_size() {
        let g = path3();
        let mut s = Solution::empty(3);
        assert!(s.insert(&g, 1));
        assert!(!s.insert(&g, 1));
        assert!(s.insert(&g, 0));
        assert_eq!(s.weight(), 8.0);
        assert!(s.remove(&g, 1));
        assert!(!s.remove(&g, 1));
        assert_eq!(s.len(), 1);
        assert_eq!(s.members(), &[0]);
        assert_eq!(s.weight(), 3.0);
    }

    #[test]
    fn maximalize_forced_completion() {
        let g = cycle4();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = Solution::from_nodes(&g, [0]).unwrap();
        make_maximal(&g, &mut s, &mut rng);
        assert_eq!(s.sorted_members(), vec![0, 2]);

        let before = s.clone();
        make_maximal(&g, &mut s, &mut rng);
        assert_eq!(s, before);

        let iso = Graph::from_edges(vec![1.0, 2.0, 3.0], []).unwrap().0;
        let mut s = Solution::empty(3);
        make_maximal(&iso, &mut s, &mut rng);
        assert_eq!(s.len(), 3);
        assert_eq!(s.weight(), 6.0);
    }

    #[test]
    fn maximalize_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(1..40);
            let p = rng.gen_range(0.0..0.5);
            let g = random_graph(&mut rng, n, p);
            // random independent seed set
            let mut s = Solution::empty(n);
            for v in 0..n {
                if rng.gen_bool(0.2) && g.neighbors(v).iter().all(|&u| !s.contains(u)) {
                    s.insert(&g, v);
                }
            }
            let seed = s.clone();
            make_maximal(&g, &mut s, &mut rng);
            assert!(is_independent(&g, &s));
            assert!(is_maximal(&g, &s));
            assert!(seed.members().iter().all(|&v| s.contains(v)));
            assert!(s.weight() >= seed.weight());
        }
    }

    #[test]
    fn equivalence_basics() {
        let g = Graph::from_edges(vec![5.0, 5.0], [(0, 1)]).unwrap().0;
        let a = Solution::from_nodes(&g, [0]).unwrap();
        let b = Solution::from_nodes(&g, [1]).unwrap();
        assert!(solutions_equivalent(&g, &a, &a, None));
        assert!(solutions_equivalent(&g, &a, &b, None));
        assert!(solutions_equivalent(&g, &b, &a, None));

        let g = Graph::from_edges(vec![5.0, 6.0], [(0, 1)]).unwrap().0;
        let a = Solution::from_nodes(&g, [0]).unwrap();
        let b = Solution::from_nodes(&g, [1]).unwrap();
        assert!(!solutions_equivalent(&g, &a, &b, None));
    }

    #[test]
    fn equivalence_through_one_star_move() {
        // star centre 0 (w 4) with leaves 1, 2 (w 2 each): {0} ~ {1, 2}
        let g = Graph::from_edges(vec![4.0, 2.0, 2.0], [(0, 1), (0, 2)]).unwrap().0;
        let a = Solution::from_nodes(&g, [0]).unwrap();
        let b = Solution::from_nodes(&g, [1, 2]).unwrap();
        assert!(solutions_equivalent(&g, &a, &b, None));
        assert!(solutions_equivalent(&g, &b, &a, None));
        assert!(!solutions_equivalent(&g, &a, &b, Some(0)));
    }

    #[test]
    fn equal_weight_but_not_reachable() {
        // 4-cycle with unit weights: {0,2} and {1,3} need a (2,2) move
        let g = cycle4();
        let a = Solution::from_nodes(&g, [0, 2]).unwrap();
        let b = Solution::from_nodes(&g, [1, 3]).unwrap();
        assert!(!solutions_equivalent(&g, &a, &b, None));
    }

    #[test]
    fn solution_file_roundtrip_and_validation() {
        let g = path3();
        let s = Solution::from_nodes(&g, [2, 0]).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        let back = parse_solution(buf.as_slice(), &g).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.weight(), 6.0);

        let err = parse_solution("0\n1\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(err, SolutionError::NotIndependent(0, 1)));
        let err = parse_solution("# c\n9\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(err, SolutionError::NodeOutOfRange { node: 9, .. }));
        let err = parse_solution("0\nzz\n".as_bytes(), &g).unwrap_err();
        assert!(matches!(err, SolutionError::Parse { line: 2, .. }));
    }
}
