//! Compare the static, randomized and adaptive greedy constructors.

use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::greedy::{adaptive_greedy, greedy, randomized_greedy, GreedyConfig, GreedyMode};
use mwis::solution::{is_independent, is_maximal};
use mwis::SolverRng;
use rand::SeedableRng;

fn main() {
    let g = GenSpec {
        model: Model::Gnp { n: 2000, p: 0.005 },
        weights: WeightRule::UniformInt { lo: 1, hi: 200 },
        seed: 7,
    }
    .generate()
    .expect("valid generator parameters");

    let s = greedy(&g);
    println!("static greedy      w = {:>8}, |S| = {}", s.weight(), s.len());
    let s = adaptive_greedy(&g);
    println!("adaptive greedy    w = {:>8}, |S| = {}", s.weight(), s.len());

    let mut rng = SolverRng::seed_from_u64(1);
    for k in [0.01, 0.1, 0.5] {
        let cfg = GreedyConfig {
            k_fraction: k,
            mode: GreedyMode::Randomized,
        };
        let s = randomized_greedy(&g, &cfg, &mut rng);
        assert!(is_independent(&g, &s) && is_maximal(&g, &s));
        println!("randomized k={k:<4}  w = {:>8}, |S| = {}", s.weight(), s.len());
    }
}
