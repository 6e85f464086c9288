//! Run local search from a random maximal set, observing every committed move.

use std::collections::BTreeMap;

use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::local_search::{Engine, LocalSearchParams, SearchControl};
use mwis::solution::make_maximal;
use mwis::{Solution, SolverRng};
use rand::SeedableRng;

fn main() {
    let g = GenSpec {
        model: Model::Gnp { n: 1000, p: 0.006 },
        weights: WeightRule::default(),
        seed: 11,
    }
    .generate()
    .expect("valid generator parameters");
    let mut rng = SolverRng::seed_from_u64(2);
    let mut s0 = Solution::empty(g.node_count());
    make_maximal(&g, &mut s0, &mut rng);
    println!("random maximal start: w = {}", s0.weight());

    let mut tally: BTreeMap<String, (u64, f64)> = BTreeMap::new();
    let mut engine = Engine::new(&g, s0, LocalSearchParams::default()).expect("start is independent");
    engine.set_observer(|_, _, _, m| {
        let entry = tally.entry(format!("{:?}", m.kind)).or_default();
        entry.0 += 1;
        entry.1 += m.gain;
    });
    let outcome = engine.run(&mut rng, &mut SearchControl::default());
    drop(engine);

    for (kind, (count, gain)) in &tally {
        println!("  {kind:<9} {count:>6} moves, total gain {gain:>9}");
    }
    println!(
        "best w = {} after {} outer iterations ({} moves)",
        outcome.best.weight(),
        outcome.outer_iterations,
        outcome.moves
    );
}
