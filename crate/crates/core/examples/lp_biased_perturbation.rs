//! Bias perturbations with a fractional LP-style solution.

use mwis::driver::{run, RunConfig};
use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::lp_bias::{RelaxedSolution, DEFAULT_EPSILON};
use mwis::SolverRng;
use rand::SeedableRng;

fn main() {
    // x = (0.5, 0.0, 0.5): node 1 keeps a small chance through epsilon
    let (rs, clamped) = RelaxedSolution::new(vec![0.5, 0.0, 0.5], DEFAULT_EPSILON).expect("finite values");
    let mut rng = SolverRng::seed_from_u64(0);
    let mut counts = [0u32; 3];
    for _ in 0..100_000 {
        counts[rs.sample(&mut rng)] += 1;
    }
    println!("clamped {clamped}; P = {:?}", (0..3).map(|v| rs.probability(v)).collect::<Vec<_>>());
    println!("100000 draws: {counts:?}");

    // on a grid the checkerboard is a natural fractional hint
    let (rows, cols) = (60, 60);
    let g = GenSpec {
        model: Model::Grid { rows, cols },
        weights: WeightRule::default(),
        seed: 8,
    }
    .generate()
    .expect("valid generator parameters");
    let x = (0..rows * cols).map(|v| if (v / cols + v % cols) % 2 == 0 { 0.8 } else { 0.2 }).collect();
    let (bias, _) = RelaxedSolution::new(x, DEFAULT_EPSILON).expect("finite values");
    let cfg = RunConfig {
        time_limit: 0.5,
        ..RunConfig::default()
    };
    let plain = run(&g, &cfg, None, None).expect("valid configuration");
    let biased = run(&g, &cfg, None, Some(&bias)).expect("valid configuration");
    println!("grid {rows}x{cols}: unbiased w = {}, biased w = {}", plain.best.weight(), biased.best.weight());
}
