//! Alternating augmenting path moves.
//!
//! A path starts at a 1-tight non-member `a` of a member `u` and then
//! alternates `(x, m)` steps: `m` is a mate of the last member and `x` a
//! shared 2-tight neighbor of the two. Flipping a prefix that ends at a
//! member swaps its members out and its non-members in; independence holds
//! because every non-member on the prefix has all of its member neighbors
//! on the prefix and no two non-members on the path are adjacent.

use rand::seq::SliceRandom;
use rand::Rng;

use super::engine::{Engine, MoveKind};

impl Engine<'_, '_> {
    /// Grows one path per flagged member (seeded at a random 1-tight
    /// neighbor) and flips the best prefix if its exact gain is positive.
    pub fn aap_moves<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        // snapshot: S₁ is left intact for the (1,*) pass that follows
        let mut seeds: Vec<usize> = self.interstate().s_one().iter().copied().collect();
        seeds.shuffle(rng);
        self.add_work(seeds.len());
        let mut improved = false;
        for u in seeds {
            if !self.solution().contains(u) {
                continue;
            }
            let tight = self.interstate().one_tight(u);
            if tight.is_empty() {
                continue;
            }
            let a = tight[rng.gen_range(0..tight.len())];
            improved |= self.grow_and_flip(a, u, rng);
        }
        improved
    }

    fn grow_and_flip<R: Rng + ?Sized>(&mut self, a: usize, u: usize, rng: &mut R) -> bool {
        let g = self.graph();
        let max_len = self.params().aap_max_len;
        let noise = self.params().aap_delta;
        let floor = self.gain_floor;
        let epoch = self.next_epoch();

        let mut path = vec![a, u];
        self.stamp[a] = epoch;
        self.stamp[u] = epoch;
        for &y in g.neighbors(a) {
            self.block[y] = epoch;
        }
        let mut work = g.degree(a);
        let mut running = g.weight(a) - g.weight(u);
        let mut best_gain = running;
        let mut best_len = 2;
        let mut last = u;

        while path.len() + 2 <= max_len && running >= floor {
            let mut choice: Option<(f64, usize, usize)> = None;
            let st = self.interstate();
            for &m in st.mates(last) {
                work += 1;
                if self.stamp[m] == epoch {
                    continue;
                }
                let Some(shared) = st.two_tight(last, m) else {
                    continue;
                };
                for &x in shared {
                    work += 1;
                    if self.stamp[x] == epoch || self.block[x] == epoch {
                        continue;
                    }
                    let jitter = if noise > 0.0 { rng.gen_range(-noise..=noise) } else { 0.0 };
                    let score = running + g.weight(x) - g.weight(m) + jitter;
                    if choice.is_none_or(|(best, _, _)| score > best) {
                        choice = Some((score, x, m));
                    }
                }
            }
            let Some((_, x, m)) = choice else {
                break;
            };
            path.push(x);
            path.push(m);
            self.stamp[x] = epoch;
            self.stamp[m] = epoch;
            for &y in g.neighbors(x) {
                self.block[y] = epoch;
            }
            work += g.degree(x);
            running += g.weight(x) - g.weight(m);
            if running > best_gain {
                best_gain = running;
                best_len = path.len();
            }
            last = m;
        }
        self.add_work(work);

        if best_gain <= 0.0 {
            return false;
        }
        path.truncate(best_len);
        let outs: Vec<usize> = path.iter().step_by(2).copied().collect();
        let ins: Vec<usize> = path.iter().skip(1).step_by(2).copied().collect();
        // exact gain of the flip, free of accumulated rounding
        let gain = outs.iter().map(|&x| g.weight(x)).sum::<f64>() - ins.iter().map(|&v| g.weight(v)).sum::<f64>();
        if gain <= 0.0 {
            return false;
        }
        self.commit(MoveKind::Aap, ins, outs, gain, rng);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::super::LocalSearchParams;
    use super::*;
    use crate::graph::Graph;
    use crate::solution::{is_independent, Solution};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flips_profitable_path() {
        // a=0 (4) 1-tight to u=1 (5); x=2 (7) shared by u and its mate w=3 (5).
        // Flip {1,3} -> {0,2}: (4 + 7) - (5 + 5) = +1.
        let g = Graph::from_edges(vec![4.0, 5.0, 7.0, 5.0], [(0, 1), (1, 2), (2, 3)]).unwrap().0;
        let s = Solution::from_nodes(&g, [1, 3]).unwrap();
        let params = LocalSearchParams {
            aap_delta: 0.0,
            ..Default::default()
        };
        let mut e = Engine::new(&g, s, params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(e.aap_moves(&mut rng));
        assert_eq!(e.solution().sorted_members(), vec![0, 2]);
        assert_eq!(e.solution().weight(), 11.0);
    }

    #[test]
    fn no_seeds_no_moves() {
        let g = Graph::from_edges(vec![1.0; 4], [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap().0;
        let s = Solution::from_nodes(&g, [0, 2]).unwrap();
        let mut e = Engine::new(&g, s, LocalSearchParams::default()).unwrap();
        assert!(e.interstate().s_one().is_empty());
        assert!(!e.aap_moves(&mut ChaCha8Rng::seed_from_u64(0)));
    }

    #[test]
    fn flips_keep_independence_and_improve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut flips = 0;
        for _ in 0..200 {
            let n = rng.gen_range(6..30);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.2) {
                        edges.push((u, v));
                    }
                }
            }
            let w = (0..n).map(|_| rng.gen_range(1..=200) as f64).collect();
            let g = Graph::from_edges(w, edges).unwrap().0;
            let mut e = Engine::new(&g, Solution::empty(n), LocalSearchParams::default()).unwrap();
            e.maximalize(&mut rng);
            for _ in 0..5 {
                let before = e.solution().weight();
                if e.aap_moves(&mut rng) {
                    flips += 1;
                    assert!(e.solution().weight() > before);
                }
                assert!(is_independent(&g, e.solution()));
                e.interstate().check_against_rebuild(&g, e.solution()).unwrap();
            }
        }
        assert!(flips > 0);
    }
}
