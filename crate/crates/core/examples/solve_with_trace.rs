//! Full solver run with a reproducible work clock; prints the trace CSV and
//! the JSON summary.

use mwis::clock::{ClockMode, DEFAULT_WORK_RATE};
use mwis::driver::{run, RunConfig, Summary};
use mwis::generate::{GenSpec, Model, WeightRule};

fn main() {
    let g = GenSpec {
        model: Model::Gnp { n: 3000, p: 0.002 },
        weights: WeightRule::default(),
        seed: 1,
    }
    .generate()
    .expect("valid generator parameters");
    let cfg = RunConfig {
        time_limit: 1.0,
        seed: 42,
        clock: ClockMode::Work {
            units_per_second: DEFAULT_WORK_RATE,
        },
        ..RunConfig::default()
    };
    let result = run(&g, &cfg, None, None).expect("valid configuration");
    print!("{}", result.trace.to_csv());
    let summary = Summary::new(&g, &cfg, &result);
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
}
