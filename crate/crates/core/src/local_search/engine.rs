use rand::seq::SliceRandom;
use rand::Rng;

use super::LocalSearchParams;
use crate::graph::Graph;
use crate::interstate::{Interstate, InterstateError};
use crate::lp_bias::RelaxedSolution;
use crate::oracle::max_weight_subset;
use crate::solution::Solution;

/// Attempts at drawing a non-member before falling back to an explicit list.
const SAMPLE_TRIES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    StarOne,
    OneStar,
    TwoStar,
    Aap,
    Perturb,
}

/// A committed change of the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveOutcome {
    pub kind: MoveKind,
    pub improved: bool,
    /// Realized weight change, re-maximalization included.
    pub gain: f64,
    /// Gain the move was accepted on, before re-maximalization.
    pub predicted_gain: f64,
    pub nodes_added: Vec<usize>,
    pub nodes_removed: Vec<usize>,
}

pub type MoveObserver<'o> = Box<dyn FnMut(&Graph, &Solution, &Interstate, &MoveOutcome) + 'o>;

/// Owns a solution and its interstate structure and applies moves to both.
pub struct Engine<'g, 'o> {
    g: &'g Graph,
    s: Solution,
    st: Interstate,
    params: LocalSearchParams,
    pub(super) gain_floor: f64,
    /// Epoch-stamped scratch marks; a node is marked iff its stamp equals
    /// the current epoch.
    pub(super) stamp: Vec<u32>,
    pub(super) block: Vec<u32>,
    pub(super) epoch: u32,
    moves: u64,
    work: u64,
    check_every: Option<u64>,
    observer: Option<MoveObserver<'o>>,
}

impl<'g, 'o> Engine<'g, 'o> {
    pub fn new(g: &'g Graph, s: Solution, params: LocalSearchParams) -> Result<Self, InterstateError> {
        let st = Interstate::build(g, &s)?;
        let n = g.node_count();
        Ok(Engine {
            g,
            s,
            st,
            gain_floor: params.gain_floor(g),
            params,
            stamp: vec![0; n],
            block: vec![0; n],
            epoch: 0,
            moves: 0,
            work: (n + 2 * g.edge_count()) as u64,
            check_every: None,
            observer: None,
        })
    }

    /// Compare the interstate structure against a rebuild every `k`
    /// committed moves; a mismatch panics.
    pub fn check_interstate_every(&mut self, k: Option<u64>) {
        self.check_every = k.filter(|&k| k > 0);
    }

    /// Called after every committed move.
    pub fn set_observer(&mut self, observer: impl FnMut(&Graph, &Solution, &Interstate, &MoveOutcome) + 'o) {
        self.observer = Some(Box::new(observer));
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn solution(&self) -> &Solution {
        &self.s
    }

    pub fn interstate(&self) -> &Interstate {
        &self.st
    }

    pub fn params(&self) -> &LocalSearchParams {
        &self.params
    }

    pub fn into_solution(self) -> Solution {
        self.s
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    /// Work units accumulated since the last call (adjacency entries and
    /// candidates touched); drives the deterministic clock.
    pub fn take_work(&mut self) -> u64 {
        std::mem::take(&mut self.work)
    }

    pub(super) fn add_work(&mut self, units: usize) {
        self.work += units as u64;
    }

    pub(super) fn refresh_weight(&mut self) -> f64 {
        self.s.refresh_weight(self.g)
    }

    pub(super) fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.block.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Adds every free node, in random order.
    pub fn maximalize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut free: Vec<usize> = self
            .g
            .nodes()
            .filter(|&v| !self.s.contains(v) && self.st.rho(v) == 0)
            .collect();
        free.shuffle(rng);
        self.add_work(self.g.node_count());
        for v in free {
            if !self.s.contains(v) && self.st.rho(v) == 0 {
                self.add_work(self.g.degree(v));
                self.st.add_member(self.g, &mut self.s, v);
            }
        }
    }

    /// Removes `removed`, adds `added`, then re-maximalizes around the
    /// removed nodes in random order.
    pub(super) fn commit<R: Rng + ?Sized>(
        &mut self,
        kind: MoveKind,
        removed: Vec<usize>,
        mut added: Vec<usize>,
        predicted_gain: f64,
        rng: &mut R,
    ) -> MoveOutcome {
        let g = self.g;
        let before = self.s.weight();
        for &v in &removed {
            self.add_work(g.degree(v) + 1);
            self.st.remove_member(g, &mut self.s, v);
        }
        let explicit = added.len();
        for &u in &added {
            self.add_work(g.degree(u) + 1);
            self.st.add_member(g, &mut self.s, u);
        }

        let epoch = self.next_epoch();
        let mut free = Vec::new();
        for &v in &removed {
            for &x in std::iter::once(&v).chain(g.neighbors(v)) {
                if self.stamp[x] != epoch && !self.s.contains(x) && self.st.rho(x) == 0 {
                    self.stamp[x] = epoch;
                    free.push(x);
                }
            }
            self.add_work(g.degree(v));
        }
        free.shuffle(rng);
        for x in free {
            if !self.s.contains(x) && self.st.rho(x) == 0 {
                self.add_work(g.degree(x) + 1);
                self.st.add_member(g, &mut self.s, x);
                added.push(x);
            }
        }
        debug_assert!(added[explicit..].iter().all(|&x| self.s.contains(x)));

        let gain = self.s.weight() - before;
        let outcome = MoveOutcome {
            kind,
            improved: gain > 0.0,
            gain,
            predicted_gain,
            nodes_added: added,
            nodes_removed: removed,
        };
        self.moves += 1;
        if let Some(k) = self.check_every {
            if self.moves.is_multiple_of(k) {
                if let Err(e) = self.st.check_against_rebuild(g, &self.s) {
                    panic!("interstate diverged after move {}: {e}", self.moves);
                }
            }
        }
        if let Some(observer) = self.observer.as_mut() {
            observer(g, &self.s, &self.st, &outcome);
        }
        outcome
    }

    /// `(*,1)` moves: insert any non-member whose Δ is positive, evicting
    /// its member neighbors.
    pub fn star_one_moves<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let g = self.g;
        let mut improved = false;
        while let Some(u) = self.st.pop_s_plus(rng) {
            self.add_work(1);
            if self.s.contains(u) {
                continue;
            }
            self.add_work(g.degree(u));
            let delta = self.st.resync_delta(g, &self.s, u);
            if delta <= 0.0 {
                continue;
            }
            let evicted: Vec<usize> = g.neighbors(u).iter().copied().filter(|&v| self.s.contains(v)).collect();
            self.commit(MoveKind::StarOne, evicted, vec![u], delta, rng);
            improved = true;
        }
        improved
    }

    /// `(1,*)` moves: replace a member by a heavier independent subset of
    /// its 1-tight neighbors.
    pub fn one_star_moves<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let g = self.g;
        let mut improved = false;
        while let Some(v) = self.st.pop_s_one(rng) {
            self.add_work(1);
            if !self.s.contains(v) {
                continue;
            }
            let pool: Vec<usize> = self.st.one_tight(v).iter().copied().collect();
            if pool.is_empty() {
                continue;
            }
            let (weight, chosen) = if pool.len() <= self.params.exact_recursion_limit {
                self.exact_replacement(&pool)
            } else {
                self.greedy_replacement(pool)
            };
            if weight > g.weight(v) {
                self.commit(MoveKind::OneStar, vec![v], chosen, weight - g.weight(v), rng);
                improved = true;
            }
        }
        improved
    }

    fn exact_replacement(&mut self, pool: &[usize]) -> (f64, Vec<usize>) {
        let g = self.g;
        let weights: Vec<f64> = pool.iter().map(|&x| g.weight(x)).collect();
        let mut conflicts = vec![0u32; pool.len()];
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                if g.is_edge(pool[i], pool[j]) {
                    conflicts[i] |= 1 << j;
                    conflicts[j] |= 1 << i;
                }
            }
        }
        self.add_work(pool.len() * pool.len() + (1 << pool.len()));
        let (_, mask) = max_weight_subset(&weights, &conflicts);
        let chosen: Vec<usize> = (0..pool.len()).filter(|&i| mask & (1 << i) != 0).map(|i| pool[i]).collect();
        let weight = chosen.iter().map(|&x| g.weight(x)).sum();
        (weight, chosen)
    }

    fn greedy_replacement(&mut self, mut pool: Vec<usize>) -> (f64, Vec<usize>) {
        let g = self.g;
        pool.sort_by(|&a, &b| g.weight(b).total_cmp(&g.weight(a)).then(a.cmp(&b)));
        let epoch = self.next_epoch();
        let mut chosen = Vec::new();
        let mut weight = 0.0;
        for x in pool {
            self.work += 1;
            if self.block[x] == epoch {
                continue;
            }
            chosen.push(x);
            weight += g.weight(x);
            for &y in g.neighbors(x) {
                self.block[y] = epoch;
            }
            self.add_work(g.degree(x));
        }
        (weight, chosen)
    }

    /// `(2,*)` moves: one random-insertion trial per flagged mate pair.
    /// Returns as soon as a trial improves the solution.
    pub fn two_star_moves<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let g = self.g;
        while let Some((a, b)) = self.st.pop_s_two(rng) {
            self.add_work(1);
            if !self.s.contains(a) || !self.s.contains(b) {
                continue;
            }
            let Some(shared) = self.st.two_tight(a, b) else {
                continue;
            };
            // candidates only have a or b as member neighbors, so removing
            // the pair frees all of them; conflicts are among themselves
            let mut pool: Vec<usize> = self
                .st
                .one_tight(a)
                .iter()
                .chain(self.st.one_tight(b))
                .chain(shared)
                .copied()
                .collect();
            pool.shuffle(rng);
            let epoch = self.next_epoch();
            let mut chosen = Vec::new();
            let mut total = 0.0;
            for &x in &pool {
                self.work += 1;
                if self.block[x] == epoch {
                    continue;
                }
                chosen.push(x);
                total += g.weight(x);
                for &y in g.neighbors(x) {
                    self.block[y] = epoch;
                }
                self.add_work(g.degree(x));
            }
            let removed_weight = g.weight(a) + g.weight(b);
            if total > removed_weight {
                self.commit(MoveKind::TwoStar, vec![a, b], chosen, total - removed_weight, rng);
                return true;
            }
        }
        false
    }

    /// Forces `perturb_count` non-members into the solution, drawn
    /// uniformly or from the LP-biased sampler.
    pub fn perturb<R: Rng + ?Sized>(&mut self, rng: &mut R, bias: Option<&RelaxedSolution>) {
        let g = self.g;
        let n = g.node_count();
        for _ in 0..self.params.perturb_count {
            if self.s.len() == n {
                return;
            }
            let Some(v) = self.draw_outsider(rng, bias) else {
                return;
            };
            let evicted: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| self.s.contains(u)).collect();
            let predicted = g.weight(v) - evicted.iter().map(|&u| g.weight(u)).sum::<f64>();
            self.add_work(g.degree(v));
            self.commit(MoveKind::Perturb, evicted, vec![v], predicted, rng);
        }
    }

    fn draw_outsider<R: Rng + ?Sized>(&mut self, rng: &mut R, bias: Option<&RelaxedSolution>) -> Option<usize> {
        let n = self.g.node_count();
        if let Some(bias) = bias {
            for _ in 0..SAMPLE_TRIES {
                let (v, probes) = bias.sample_counting(rng);
                self.add_work(probes as usize);
                if !self.s.contains(v) {
                    return Some(v);
                }
            }
        }
        for _ in 0..SAMPLE_TRIES {
            let v = rng.gen_range(0..n);
            self.add_work(1);
            if !self.s.contains(v) {
                return Some(v);
            }
        }
        self.add_work(n);
        let outsiders: Vec<usize> = self.g.nodes().filter(|&v| !self.s.contains(v)).collect();
        outsiders.choose(rng).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::{is_independent, is_maximal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine<'o>(g: &Graph, members: &[usize]) -> Engine<'static, 'o> {
        let g: &'static Graph = Box::leak(Box::new(g.clone()));
        let s = Solution::from_nodes(g, members.iter().copied()).unwrap();
        Engine::new(g, s, LocalSearchParams::default()).unwrap()
    }

    #[test]
    fn star_one_applies_positive_delta() {
        // u = 0 (w 10) blocked by members 1 (w 3) and 2 (w 4): Δ = 3
        let g = Graph::from_edges(vec![10.0, 3.0, 4.0], [(0, 1), (0, 2)]).unwrap().0;
        let mut e = engine(&g, &[1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(e.star_one_moves(&mut rng));
        assert_eq!(e.solution().sorted_members(), vec![0]);
        assert_eq!(e.solution().weight(), 10.0);
        assert!(!e.star_one_moves(&mut rng));
    }

    #[test]
    fn star_one_gain_includes_remaximalization() {
        // inserting 0 evicts 1; leaf 3 hangs off 1 only and becomes free
        let g = Graph::from_edges(vec![10.0, 3.0, 1.0, 2.0], [(0, 1), (1, 3), (0, 2)]).unwrap().0;
        let mut seen = Vec::new();
        let mut e = engine(&g, &[1, 2]);
        e.set_observer(|_, _, _, m: &MoveOutcome| seen.push(m.clone()));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(e.star_one_moves(&mut rng));
        drop(e);
        assert_eq!(seen[0].predicted_gain, 6.0);
        assert_eq!(seen[0].gain, 8.0);
        assert_eq!(seen[0].nodes_added, vec![0, 3]);
    }

    #[test]
    fn one_star_non_adjacent_pair() {
        // v = 0 (w 5), 1-tight 1 and 2 (w 3 each), non-adjacent: gain +1
        let g = Graph::from_edges(vec![5.0, 3.0, 3.0], [(0, 1), (0, 2)]).unwrap().0;
        let mut e = engine(&g, &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(e.one_star_moves(&mut rng));
        assert_eq!(e.solution().sorted_members(), vec![1, 2]);
        assert_eq!(e.solution().weight(), 6.0);
    }

    #[test]
    fn one_star_adjacent_pair_rejected() {
        let g = Graph::from_edges(vec![5.0, 3.0, 3.0], [(0, 1), (0, 2), (1, 2)]).unwrap().0;
        let mut e = engine(&g, &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!e.one_star_moves(&mut rng));
        assert_eq!(e.solution().sorted_members(), vec![0]);
        assert!(e.interstate().s_one().is_empty());
    }

    #[test]
    fn one_star_greedy_for_large_sets() {
        // star centre w 10 with 9 leaves of weight 2: greedy takes all leaves
        let edges: Vec<_> = (1..10).map(|i| (0, i)).collect();
        let mut w = vec![10.0];
        w.extend([2.0; 9]);
        let g = Graph::from_edges(w, edges).unwrap().0;
        let mut e = engine(&g, &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(e.one_star_moves(&mut rng));
        assert_eq!(e.solution().weight(), 18.0);
    }

    #[test]
    fn two_star_inserts_all_shared() {
        // mates 0, 1 (w 2) with shared 2-tight 2, 3, 4 (w 2, independent)
        let edges = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)];
        let g = Graph::from_edges(vec![2.0; 5], edges).unwrap().0;
        for seed in 0..6 {
            let mut e = engine(&g, &[0, 1]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert!(e.two_star_moves(&mut rng));
            assert_eq!(e.solution().sorted_members(), vec![2, 3, 4]);
            assert_eq!(e.solution().weight(), 6.0);
        }
    }

    #[test]
    fn two_star_rejects_light_candidates() {
        // mates 0, 1 (w 10); candidates 2 (w 3) shared, 3 (w 2) 1-tight to 0
        let g = Graph::from_edges(vec![10.0, 10.0, 3.0, 2.0], [(0, 2), (1, 2), (0, 3)]).unwrap().0;
        let mut e = engine(&g, &[0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!e.two_star_moves(&mut rng));
        assert!(e.interstate().s_two().is_empty());
        assert_eq!(e.solution().sorted_members(), vec![0, 1]);
        assert!(!e.two_star_moves(&mut rng));
    }

    #[test]
    fn perturb_on_edgeless_graph_is_noop() {
        let g = Graph::from_edges(vec![1.0; 4], []).unwrap().0;
        let mut e = engine(&g, &[0, 1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        e.perturb(&mut rng, None);
        assert_eq!(e.solution().len(), 4);
        assert_eq!(e.moves(), 0);
    }

    #[test]
    fn perturb_keeps_structure_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 40;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.15) {
                    edges.push((u, v));
                }
            }
        }
        let w = (0..n).map(|i| (i % 7 + 1) as f64).collect();
        let g = Graph::from_edges(w, edges).unwrap().0;
        let mut e = engine(&g, &[]);
        e.maximalize(&mut rng);
        let (bias, _) = RelaxedSolution::new((0..n).map(|i| (i % 3) as f64 / 2.0).collect(), 0.005).unwrap();
        for round in 0..200 {
            e.perturb(&mut rng, if round % 2 == 0 { Some(&bias) } else { None });
            assert!(is_independent(&g, e.solution()));
            assert!(is_maximal(&g, e.solution()));
            e.interstate().check_against_rebuild(&g, e.solution()).unwrap();
        }
    }
}
