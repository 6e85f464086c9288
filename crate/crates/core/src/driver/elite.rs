use rand::Rng;

use crate::solution::Solution;

/// Bounded pool of locally optimal solutions. Candidates replace the most
/// similar entry that is no heavier than themselves.
#[derive(Debug, Clone)]
pub struct EliteSet {
    capacity: usize,
    entries: Vec<(Solution, u64)>,
    next_seq: u64,
}

impl EliteSet {
    /// Panics if `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "elite set capacity must be positive");
        EliteSet {
            capacity,
            entries: Vec::with_capacity(capacity),
            next_seq: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.entries.iter().map(|(s, _)| s)
    }

    /// Inserts `s` unless it duplicates an entry. When full, evicts, among
    /// entries weighing at most `w(s)`, the one with the smallest symmetric
    /// difference to `s` (then the lighter, then the older); rejects `s` if
    /// every entry is heavier.
    pub fn try_add_and_evict(&mut self, s: &Solution) -> bool {
        if self.entries.iter().any(|(e, _)| e == s) {
            return false;
        }
        let seq = self.next_seq;
        if self.entries.len() < self.capacity {
            self.entries.push((s.clone(), seq));
            self.next_seq += 1;
            return true;
        }
        let victim = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, (e, _))| e.weight() <= s.weight())
            .min_by(|(_, (a, sa)), (_, (b, sb))| {
                a.symmetric_difference_len(s)
                    .cmp(&b.symmetric_difference_len(s))
                    .then(a.weight().total_cmp(&b.weight()))
                    .then(sa.cmp(sb))
            })
            .map(|(i, _)| i);
        match victim {
            Some(i) => {
                self.entries[i] = (s.clone(), seq);
                self.next_seq += 1;
                true
            }
            None => false,
        }
    }

    /// Uniformly random entry. Panics if the set is empty.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> &Solution {
        assert!(!self.entries.is_empty(), "random draw from an empty elite set");
        &self.entries[rng.gen_range(0..self.entries.len())].0
    }

    /// Heaviest entry, the older one on ties.
    pub fn best(&self) -> Option<&Solution> {
        self.entries
            .iter()
            .max_by(|(a, sa), (b, sb)| a.weight().total_cmp(&b.weight()).then(sb.cmp(sa)))
            .map(|(s, _)| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn edgeless(weights: &[f64]) -> Graph {
        Graph::from_edges(weights.to_vec(), []).unwrap().0
    }

    #[test]
    fn capacity_one_replacement() {
        // node 0 weighs 10, node 1 weighs 12, node 2 weighs 9
        let g = edgeless(&[10.0, 12.0, 9.0]);
        let mut es = EliteSet::new(1);
        assert!(es.try_add_and_evict(&Solution::from_nodes(&g, [0]).unwrap()));
        assert!(!es.try_add_and_evict(&Solution::from_nodes(&g, [2]).unwrap()));
        assert!(es.try_add_and_evict(&Solution::from_nodes(&g, [1]).unwrap()));
        assert_eq!(es.best().unwrap().weight(), 12.0);
        assert_eq!(es.len(), 1);
    }

    #[test]
    fn rejects_duplicates() {
        let g = edgeless(&[1.0, 2.0]);
        let mut es = EliteSet::new(3);
        let s = Solution::from_nodes(&g, [0]).unwrap();
        assert!(es.try_add_and_evict(&s));
        assert!(!es.try_add_and_evict(&s.clone()));
        assert_eq!(es.len(), 1);
    }

    #[test]
    fn evicts_most_similar_lighter_entry() {
        let g = edgeless(&[1.0; 6]);
        let mut es = EliteSet::new(2);
        let near = Solution::from_nodes(&g, [0, 1, 2]).unwrap();
        let far = Solution::from_nodes(&g, [3, 4, 5]).unwrap();
        es.try_add_and_evict(&near);
        es.try_add_and_evict(&far);
        let candidate = Solution::from_nodes(&g, [0, 1, 3]).unwrap();
        assert!(es.try_add_and_evict(&candidate));
        let kept: Vec<_> = es.solutions().map(|s| s.sorted_members()).collect();
        assert!(kept.contains(&vec![3, 4, 5]) && kept.contains(&vec![0, 1, 3]));
    }

    #[test]
    fn ties_evict_older_entry() {
        let g = edgeless(&[1.0; 4]);
        let mut es = EliteSet::new(2);
        es.try_add_and_evict(&Solution::from_nodes(&g, [0]).unwrap());
        es.try_add_and_evict(&Solution::from_nodes(&g, [1]).unwrap());
        assert!(es.try_add_and_evict(&Solution::from_nodes(&g, [2]).unwrap()));
        let kept: Vec<_> = es.solutions().map(|s| s.sorted_members()).collect();
        assert!(kept.contains(&vec![1]) && kept.contains(&vec![2]));
    }

    #[test]
    fn random_with_single_entry() {
        let g = edgeless(&[1.0]);
        let mut es = EliteSet::new(1);
        es.try_add_and_evict(&Solution::from_nodes(&g, [0]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(es.random(&mut rng).sorted_members(), vec![0]);
        }
    }
}
