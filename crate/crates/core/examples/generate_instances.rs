//! Generate a few synthetic instances and write them in both file formats.

use mwis::generate::{GenSpec, Model, WeightRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("mwis-instances");
    std::fs::create_dir_all(&dir)?;
    let specs = [
        ("gnp", Model::Gnp { n: 10_000, p: 0.0005 }, WeightRule::default()),
        ("grid", Model::Grid { rows: 50, cols: 80 }, WeightRule::UniformInt { lo: 1, hi: 10 }),
        ("cycle", Model::Cycle { n: 1001 }, WeightRule::IdMod { c: 200 }),
        ("star", Model::Star { n: 50 }, "id-mod:7".parse()?),
    ];
    for (name, model, weights) in specs {
        let g = GenSpec { model, weights, seed: 2024 }.generate()?;
        let el = dir.join(format!("{name}.txt"));
        g.save_edge_list(&el)?;
        let metis = dir.join(format!("{name}.graph"));
        g.write_metis(std::fs::File::create(&metis)?)?;
        println!(
            "{name:<6} n = {:>6}, m = {:>6}, W = {:>9} -> {}",
            g.node_count(),
            g.edge_count(),
            g.total_weight(),
            el.display()
        );
    }
    Ok(())
}
