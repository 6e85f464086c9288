//! Drive the interstate structure with random insertions and removals and
//! check it against a from-scratch rebuild.

use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::interstate::Interstate;
use mwis::{Solution, SolverRng};
use rand::{Rng, SeedableRng};

fn main() {
    let g = GenSpec {
        model: Model::Gnp { n: 300, p: 0.02 },
        weights: WeightRule::default(),
        seed: 3,
    }
    .generate()
    .expect("valid generator parameters");
    let mut rng = SolverRng::seed_from_u64(5);
    let mut s = Solution::empty(g.node_count());
    let mut st = Interstate::build(&g, &s).expect("empty set is independent");

    for round in 1..=5 {
        for _ in 0..2000 {
            let v = rng.gen_range(0..g.node_count());
            if s.contains(v) {
                st.remove_member(&g, &mut s, v);
            } else if st.rho(v) == 0 {
                st.add_member(&g, &mut s, v);
            }
        }
        let improving = g.nodes().filter(|&u| !s.contains(u) && st.delta(u) > 0.0).count();
        println!(
            "round {round}: |S| = {:>3}, w = {:>6}, |S+| = {:>3} (positive-delta outsiders {improving}), \
             |S1| = {:>3}, |S2| = {:>3}, mate pairs = {}",
            s.len(),
            s.weight(),
            st.s_plus().len(),
            st.s_one().len(),
            st.s_two().len(),
            st.mate_pair_count()
        );
        st.check_against_rebuild(&g, &s).expect("incremental state matches a rebuild");
    }
    println!("incremental state matched the rebuild after every round");
}
