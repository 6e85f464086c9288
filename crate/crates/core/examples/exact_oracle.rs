//! Exact solutions for small graphs, compared with the heuristic.

use mwis::driver::{run, RunConfig};
use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::oracle::exact_mwis;
use mwis::Graph;

fn main() {
    // heavier pair {3, 4} beats the larger set {0, 1, 2}
    let (g, _) = Graph::from_edges(vec![4.0, 4.0, 5.0, 7.0, 9.0], [(0, 3), (1, 3), (1, 4), (2, 4)]).expect("valid graph");
    let r = exact_mwis(&g).expect("small graph");
    println!("5-node instance: optimum {:?}, weight {}, {} branch nodes", r.witness, r.weight, r.explored);

    let cfg = RunConfig {
        time_limit: 0.2,
        ..RunConfig::default()
    };
    let mut matched = 0;
    for seed in 0..20 {
        let g = GenSpec {
            model: Model::Gnp { n: 28, p: 0.25 },
            weights: WeightRule::default(),
            seed,
        }
        .generate()
        .expect("valid generator parameters");
        let exact = exact_mwis(&g).expect("n <= 30");
        let heuristic = run(&g, &cfg, None, None).expect("valid configuration");
        matched += (exact.weight == heuristic.best.weight()) as u32;
    }
    println!("heuristic matched the exact optimum on {matched}/20 random graphs (n = 28)");
}
