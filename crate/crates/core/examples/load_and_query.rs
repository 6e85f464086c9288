//! Parse a weighted graph (a file given on the command line, or a built-in
//! edge list) and query it.
//!
//!     cargo run --example load_and_query [-- path/to/graph.txt [metis]]

use mwis::graph::parse_edge_list;
use mwis::{Graph, GraphFormat};

const BUILTIN: &str = "\
# a 5-node instance; a self-loop and a duplicate edge get repaired
5 6
w 0 4
w 1 4
w 2 5
w 3 7
w 4 9
e 0 3
e 1 3
e 1 4
e 2 4
e 4 4
e 3 0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (g, report) = match args.first() {
        Some(path) => {
            let format: GraphFormat = args.get(1).map_or("edge-list", String::as_str).parse()?;
            Graph::load(path, format)?
        }
        None => parse_edge_list(BUILTIN.as_bytes())?,
    };
    println!("n = {}, m = {}, max degree = {}", g.node_count(), g.edge_count(), g.max_degree());
    println!("total weight = {}, repaired input lines = {}", g.total_weight(), report.warnings());
    for v in g.nodes().take(5) {
        println!("  node {v}: weight {}, neighbors {:?}", g.weight(v), g.neighbors(v));
    }
    if g.node_count() >= 5 {
        println!("is_edge(1, 4) = {}, is_edge(0, 4) = {}", g.is_edge(1, 4), g.is_edge(0, 4));
    }
    Ok(())
}
