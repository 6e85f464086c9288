//! Walk from one local optimum toward another and show how the relinking
//! limits evolve over stagnations.

use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::greedy::{randomized_greedy, GreedyConfig};
use mwis::local_search::{local_search, LocalSearchParams};
use mwis::relink::{path_relink, RelinkParams};
use mwis::SolverRng;
use rand::SeedableRng;

fn main() {
    let g = GenSpec {
        model: Model::Gnp { n: 800, p: 0.01 },
        weights: WeightRule::default(),
        seed: 21,
    }
    .generate()
    .expect("valid generator parameters");
    let mut rng = SolverRng::seed_from_u64(4);
    let cfg = GreedyConfig::default();
    let elite = local_search(&g, randomized_greedy(&g, &cfg, &mut rng), &LocalSearchParams::default(), &mut rng, None);
    let guide = randomized_greedy(&g, &cfg, &mut rng);
    println!(
        "elite w = {}, guide w = {}, symmetric difference = {}",
        elite.weight(),
        guide.weight(),
        elite.symmetric_difference_len(&guide)
    );

    let mut params = RelinkParams::default();
    for stagnations in [0, 5, 20] {
        while params.stagnations() < stagnations {
            params.on_stagnation();
        }
        let out = path_relink(&g, &guide, &elite, &params, &mut rng);
        println!(
            "k = {stagnations:>2}: f = {:.6}, c_n = {:>8.2}, c_p = {:>7.3} -> {} steps (+{} / -{}), stop {:?}, w = {}",
            params.f(),
            params.c_n(),
            params.c_p(),
            out.steps,
            out.positive_steps,
            out.negative_steps,
            out.stop,
            out.solution.weight()
        );
    }
    params.reset();
    println!("after reset: f = {}, c_n = {}, c_p = {}", params.f(), params.c_n(), params.c_p());
}
