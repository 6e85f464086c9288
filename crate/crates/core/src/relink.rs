//! Adaptive truncated path relinking.
//!
//! The walk starts at the elite solution `S*` and moves toward the greedy
//! solution `S_G`, one greedy step at a time, and stops early under the
//! `(f, c_n, c_p)` limits. The limits tighten or relax with stagnation of
//! the driver; see [`RelinkParams`].

use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::FxBuildHasher;

use crate::graph::Graph;
use crate::solution::{make_maximal, Solution};

/// How `c_n` and `c_p` are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BudgetMode {
    /// Step counts.
    #[default]
    Absolute,
    /// Fractions of `|S_G △ S*|`.
    Fractional,
}

impl FromStr for BudgetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(BudgetMode::Absolute),
            "fractional" => Ok(BudgetMode::Fractional),
            other => Err(format!("unknown budget mode '{other}' (expected absolute or fractional)")),
        }
    }
}

impl fmt::Display for BudgetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetMode::Absolute => "absolute",
            BudgetMode::Fractional => "fractional",
        })
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, about 106 bits.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    /// The exact value of the shortest decimal that reads back as `x`
    /// (`0.9998` means 9998/10000, not the nearest binary fraction).
    fn from_decimal(x: f64) -> Self {
        let exact = DoubleDouble { hi: x, lo: 0.0 };
        if !x.is_finite() || x == 0.0 {
            return exact;
        }
        let text = format!("{x:e}");
        let (mantissa, exponent) = text.split_once('e').expect("float exponent form");
        let exponent: i32 = exponent.parse().expect("float exponent");
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        let fraction_digits = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        // x = digits · 10^(exponent − fraction_digits)
        let scale = fraction_digits - exponent;
        let Ok(numerator) = digits.parse::<u64>() else {
            return exact;
        };
        if !(0..=22).contains(&scale) || numerator > (1 << 53) {
            // integers and far-out magnitudes: treat the binary value as exact
            return exact;
        }
        let denom = 10f64.powi(scale);
        let numerator = if mantissa.starts_with('-') {
            -(numerator as f64)
        } else {
            numerator as f64
        };
        // residual x·10^s − p is exact in one fused operation
        let residual = x.mul_add(denom, -numerator);
        DoubleDouble::quick_two_sum(x, -residual / denom)
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let e = b - (s - a);
        DoubleDouble { hi: s, lo: e }
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    fn mul(self, other: DoubleDouble) -> DoubleDouble {
        let (p, e) = DoubleDouble::two_prod(self.hi, other.hi);
        if !p.is_finite() {
            return DoubleDouble { hi: p, lo: 0.0 };
        }
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        DoubleDouble::quick_two_sum(p, e)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Relinking limits and their stagnation schedule.
///
/// After `k` stagnations without reset the limits are
/// `f = f0·decay^k`, `c_n = c_n0·growth^k`, `c_p = c_p0·growth^k`, each the
/// correctly rounded value of the exact product of the decimal constants
/// (tracked in double-double arithmetic, so no drift accumulates).
#[derive(Debug, Clone, PartialEq)]
pub struct RelinkParams {
    pub f0: f64,
    pub c_n0: f64,
    pub c_p0: f64,
    pub f_decay: f64,
    pub budget_growth: f64,
    pub budget_mode: BudgetMode,
    stagnations: u32,
    f_acc: DoubleDouble,
    c_n_acc: DoubleDouble,
    c_p_acc: DoubleDouble,
}

impl Default for RelinkParams {
    fn default() -> Self {
        RelinkParams::new(0.9998, 1.0, 0.1, 0.9998, 1.5, BudgetMode::Absolute)
    }
}

impl RelinkParams {
    pub fn new(f0: f64, c_n0: f64, c_p0: f64, f_decay: f64, budget_growth: f64, budget_mode: BudgetMode) -> Self {
        let mut p = RelinkParams {
            f0,
            c_n0,
            c_p0,
            f_decay,
            budget_growth,
            budget_mode,
            stagnations: 0,
            f_acc: DoubleDouble { hi: f0, lo: 0.0 },
            c_n_acc: DoubleDouble { hi: c_n0, lo: 0.0 },
            c_p_acc: DoubleDouble { hi: c_p0, lo: 0.0 },
        };
        p.reset();
        p
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.f0 > 0.0 && self.f0 <= 1.0) {
            return Err("f0 must be in (0, 1]".into());
        }
        if !(self.f_decay > 0.0 && self.f_decay <= 1.0) {
            return Err("f decay must be in (0, 1]".into());
        }
        if !(self.c_n0 > 0.0 && self.c_p0 > 0.0 && self.c_n0.is_finite() && self.c_p0.is_finite()) {
            return Err("relink budgets must be positive and finite".into());
        }
        if self.c_p0 >= self.c_n0 {
            return Err("the positive-step budget must be below the negative-step budget".into());
        }
        if !(self.budget_growth >= 1.0 && self.budget_growth.is_finite()) {
            return Err("budget growth must be at least 1".into());
        }
        Ok(())
    }

    pub fn f(&self) -> f64 {
        self.f_acc.value()
    }

    pub fn c_n(&self) -> f64 {
        self.c_n_acc.value()
    }

    pub fn c_p(&self) -> f64 {
        self.c_p_acc.value()
    }

    /// Stagnations since the last reset.
    pub fn stagnations(&self) -> u32 {
        self.stagnations
    }

    /// Loosens the limits: `f ← f·decay`, `c_n ← c_n·growth`, `c_p ← c_p·growth`.
    pub fn on_stagnation(&mut self) {
        self.stagnations += 1;
        self.f_acc = self.f_acc.mul(DoubleDouble::from_decimal(self.f_decay));
        let growth = DoubleDouble::from_decimal(self.budget_growth);
        self.c_n_acc = self.c_n_acc.mul(growth);
        self.c_p_acc = self.c_p_acc.mul(growth);
    }

    /// Restores the initial limits.
    pub fn reset(&mut self) {
        self.stagnations = 0;
        self.f_acc = DoubleDouble::from_decimal(self.f0);
        self.c_n_acc = DoubleDouble::from_decimal(self.c_n0);
        self.c_p_acc = DoubleDouble::from_decimal(self.c_p0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The walk reached `S_G` (or started there).
    ReachedGuide,
    WeightFactor,
    NegativeBudget,
    PositiveBudget,
}

#[derive(Debug, Clone)]
pub struct RelinkOutcome {
    /// The last solution on the walk, maximalized.
    pub solution: Solution,
    pub steps: usize,
    pub positive_steps: usize,
    pub negative_steps: usize,
    pub stop: StopReason,
    /// Weight after each step, starting with `w(S*)`.
    pub weights: Vec<f64>,
}

type NodeSet = IndexSet<usize, FxBuildHasher>;

/// Walks from `elite` toward `greedy`. Each step either inserts a node of
/// `greedy` (evicting its neighbors) or drops a node outside `greedy`
/// (admitting the `greedy` neighbors it alone blocked); the step giving the
/// heaviest result wins, ties broken uniformly at random. The stopping step
/// stays applied.
pub fn path_relink<R: Rng + ?Sized>(
    g: &Graph,
    greedy: &Solution,
    elite: &Solution,
    params: &RelinkParams,
    rng: &mut R,
) -> RelinkOutcome {
    let n = g.node_count();
    let mut cur = elite.clone();
    let elite_weight = elite.weight();
    let mut outcome = RelinkOutcome {
        solution: elite.clone(),
        steps: 0,
        positive_steps: 0,
        negative_steps: 0,
        stop: StopReason::ReachedGuide,
        weights: vec![elite_weight],
    };
    if cur == *greedy {
        return outcome;
    }

    // member-neighbor count and blocked weight for every node w.r.t. S'
    let mut rho = vec![0u32; n];
    let mut blocked = vec![0.0f64; n];
    for &v in cur.members() {
        for &x in g.neighbors(v) {
            rho[x] += 1;
            blocked[x] += g.weight(v);
        }
    }
    let mut to_add: NodeSet = greedy.members().iter().copied().filter(|&v| !cur.contains(v)).collect();
    let mut to_drop: NodeSet = cur.members().iter().copied().filter(|&v| !greedy.contains(v)).collect();
    let distance = (to_add.len() + to_drop.len()) as f64;
    let (c_n, c_p) = match params.budget_mode {
        BudgetMode::Absolute => (params.c_n(), params.c_p()),
        BudgetMode::Fractional => (params.c_n() * distance, params.c_p() * distance),
    };
    let floor = params.f() * elite_weight;

    let mut weight = elite_weight;
    loop {
        let mut best: Option<(f64, Step)> = None;
        let mut ties = 0u32;
        let mut consider = |candidate: f64, step: Step, rng: &mut R| match best {
            Some((w, _)) if candidate < w => {}
            Some((w, _)) if candidate == w => {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some((candidate, step));
                }
            }
            _ => {
                ties = 1;
                best = Some((candidate, step));
            }
        };
        for &v in &to_add {
            consider(weight + g.weight(v) - blocked[v], Step::Insert(v), rng);
        }
        for &v in &to_drop {
            let admitted: f64 = g
                .neighbors(v)
                .iter()
                .filter(|&&u| greedy.contains(u) && rho[u] == 1)
                .map(|&u| g.weight(u))
                .sum();
            consider(weight - g.weight(v) + admitted, Step::Drop(v), rng);
        }
        let Some((_, step)) = best else {
            break;
        };

        let before = weight;
        let mut leave = Vec::new();
        let mut enter = Vec::new();
        match step {
            Step::Insert(v) => {
                leave.extend(g.neighbors(v).iter().copied().filter(|&u| cur.contains(u)));
                enter.push(v);
            }
            Step::Drop(v) => {
                leave.push(v);
                enter.extend(g.neighbors(v).iter().copied().filter(|&u| greedy.contains(u) && rho[u] == 1));
            }
        }
        for v in leave {
            cur.remove(g, v);
            weight -= g.weight(v);
            if greedy.contains(v) {
                to_add.insert(v);
            } else {
                to_drop.swap_remove(&v);
            }
            for &x in g.neighbors(v) {
                rho[x] -= 1;
                blocked[x] -= g.weight(v);
            }
        }
        for v in enter {
            cur.insert(g, v);
            weight += g.weight(v);
            if greedy.contains(v) {
                to_add.swap_remove(&v);
            } else {
                to_drop.insert(v);
            }
            for &x in g.neighbors(v) {
                rho[x] += 1;
                blocked[x] += g.weight(v);
            }
        }

        outcome.steps += 1;
        if weight >= before {
            outcome.positive_steps += 1;
        } else {
            outcome.negative_steps += 1;
        }
        outcome.weights.push(weight);

        let stop = if to_add.is_empty() && to_drop.is_empty() {
            Some(StopReason::ReachedGuide)
        } else if weight < floor {
            Some(StopReason::WeightFactor)
        } else if outcome.negative_steps as f64 > c_n {
            Some(StopReason::NegativeBudget)
        } else if outcome.positive_steps as f64 > c_p {
            Some(StopReason::PositiveBudget)
        } else {
            None
        };
        if let Some(reason) = stop {
            outcome.stop = reason;
            break;
        }
    }

    make_maximal(g, &mut cur, rng);
    cur.refresh_weight(g);
    outcome.solution = cur;
    outcome
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Insert(usize),
    Drop(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::{is_independent, is_maximal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decimal_constants_are_exact() {
        let tenth = DoubleDouble::from_decimal(0.1);
        assert_eq!(tenth.hi, 0.1);
        // 0.1 as a double exceeds 1/10 by about 5.55e-18
        assert!(tenth.lo < 0.0 && (tenth.lo + 5.551115123125783e-18).abs() < 1e-30);
        assert_eq!(DoubleDouble::from_decimal(1.5), DoubleDouble { hi: 1.5, lo: 0.0 });
        assert_eq!(DoubleDouble::from_decimal(3.0), DoubleDouble { hi: 3.0, lo: 0.0 });
    }

    #[test]
    fn one_stagnation() {
        let mut p = RelinkParams::default();
        p.on_stagnation();
        assert_eq!((p.f(), p.c_n(), p.c_p()), (0.99960004, 1.5, 0.15));
        // naive iteration lands one ulp off for c_p
        assert_ne!(0.1 * 1.5, 0.15);
    }

    #[test]
    fn reset_restores_initial_values() {
        let mut p = RelinkParams::default();
        for _ in 0..7 {
            p.on_stagnation();
        }
        p.reset();
        assert_eq!((p.f(), p.c_n(), p.c_p(), p.stagnations()), (0.9998, 1.0, 0.1, 0));
        p.reset();
        assert_eq!((p.f(), p.c_n(), p.c_p()), (0.9998, 1.0, 0.1));
    }

    #[test]
    fn budgets_overflow_gracefully() {
        let mut p = RelinkParams::default();
        for _ in 0..2000 {
            p.on_stagnation();
        }
        assert_eq!(p.c_n(), f64::INFINITY);
        assert!(p.f() > 0.0 && p.f() < 1.0);
    }

    #[test]
    fn validation() {
        assert!(RelinkParams::default().validate().is_ok());
        assert!(RelinkParams::new(0.9998, 0.1, 1.0, 0.9998, 1.5, BudgetMode::Absolute).validate().is_err());
        assert!(RelinkParams::new(1.5, 1.0, 0.1, 0.9998, 1.5, BudgetMode::Absolute).validate().is_err());
        assert_eq!("fractional".parse::<BudgetMode>().unwrap(), BudgetMode::Fractional);
        assert!("sideways".parse::<BudgetMode>().is_err());
    }

    fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let w = (0..n).map(|_| rng.gen_range(1..=200) as f64).collect();
        Graph::from_edges(w, edges).unwrap().0
    }

    #[test]
    fn identical_endpoints_return_elite() {
        let g = Graph::from_edges(vec![3.0, 5.0, 3.0], [(0, 1), (1, 2)]).unwrap().0;
        let s = Solution::from_nodes(&g, [0, 2]).unwrap();
        let out = path_relink(&g, &s, &s, &RelinkParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.solution, s);
        assert_eq!(out.steps, 0);
        assert_eq!(out.stop, StopReason::ReachedGuide);
    }

    #[test]
    fn initial_budgets_stop_early() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = gnp(&mut rng, 30, 0.15);
            let mut a = Solution::empty(30);
            make_maximal(&g, &mut a, &mut rng);
            let mut b = Solution::empty(30);
            make_maximal(&g, &mut b, &mut rng);
            let out = path_relink(&g, &a, &b, &RelinkParams::default(), &mut rng);
            // stops by the first positive or the second negative step
            assert!(out.positive_steps <= 1 && out.negative_steps <= 2);
            assert!(out.steps <= 2);
            assert!(is_independent(&g, &out.solution) && is_maximal(&g, &out.solution));
            // all but the last step keep the weight factor
            let floor = 0.9998 * b.weight();
            let n = out.weights.len();
            assert!(out.weights[..n - 1].iter().all(|&w| w >= floor));
        }
    }

    #[test]
    fn unlimited_walk_reaches_guide() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = RelinkParams::new(1e-300, 1e9, 1e8, 0.9998, 1.5, BudgetMode::Absolute);
        for _ in 0..100 {
            let g = gnp(&mut rng, 25, 0.2);
            let mut a = Solution::empty(25);
            make_maximal(&g, &mut a, &mut rng);
            let mut b = Solution::empty(25);
            make_maximal(&g, &mut b, &mut rng);
            let out = path_relink(&g, &a, &b, &params, &mut rng);
            assert_eq!(out.stop, StopReason::ReachedGuide);
            assert_eq!(out.solution, a);
            assert!(out.steps <= a.symmetric_difference_len(&b));
        }
    }

    #[test]
    fn greedy_step_choice() {
        // path 0-1-2 weights (3,5,3): from {1} toward {0,2}. Dropping 1
        // admits both ends (weight 6); inserting either end gives 3.
        let g = Graph::from_edges(vec![3.0, 5.0, 3.0], [(0, 1), (1, 2)]).unwrap().0;
        let guide = Solution::from_nodes(&g, [0, 2]).unwrap();
        let elite = Solution::from_nodes(&g, [1]).unwrap();
        let out = path_relink(&g, &guide, &elite, &RelinkParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.weights, vec![5.0, 6.0]);
        assert_eq!(out.stop, StopReason::ReachedGuide);
    }

    #[test]
    fn deterministic_under_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = gnp(&mut rng, 60, 0.1);
        let mut a = Solution::empty(60);
        make_maximal(&g, &mut a, &mut rng);
        let mut b = Solution::empty(60);
        make_maximal(&g, &mut b, &mut rng);
        let mut p = RelinkParams::default();
        for _ in 0..5 {
            p.on_stagnation();
        }
        let run = || path_relink(&g, &a, &b, &p, &mut ChaCha8Rng::seed_from_u64(42)).solution;
        assert_eq!(run(), run());
    }

    #[test]
    fn fractional_mode_scales_budgets() {
        // 8 disjoint edges; elite takes the heavy ends, guide the light ones.
        // Each step is negative; fractional budgets admit more of them.
        let edges: Vec<_> = (0..8).map(|i| (2 * i, 2 * i + 1)).collect();
        let w: Vec<f64> = (0..16).map(|i| if i % 2 == 0 { 10.0 } else { 9.0 }).collect();
        let g = Graph::from_edges(w, edges).unwrap().0;
        let elite = Solution::from_nodes(&g, (0..8).map(|i| 2 * i)).unwrap();
        let guide = Solution::from_nodes(&g, (0..8).map(|i| 2 * i + 1)).unwrap();
        let loose = |mode| RelinkParams::new(0.5, 1.0, 0.1, 0.9998, 1.5, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let abs = path_relink(&g, &guide, &elite, &loose(BudgetMode::Absolute), &mut rng);
        let frac = path_relink(&g, &guide, &elite, &loose(BudgetMode::Fractional), &mut rng);
        assert_eq!(abs.negative_steps, 2);
        assert_eq!(frac.stop, StopReason::ReachedGuide);
        assert_eq!(frac.steps, 8);
    }
}
