//! Static node-weighted graph in compressed adjacency form.
//!
//! Every node owns a contiguous, strictly ascending slice of neighbor IDs,
//! so edge-list scans stay cache friendly and `is_edge` is a binary search
//! on the smaller of the two endpoint lists.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node {node} has invalid weight {weight} (weights must be finite and non-negative)")]
    BadWeight { node: usize, weight: f64 },
    #[error("node id {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Supported on-disk graph formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `n m` header, `w <id> <weight>` and `e <u> <v>` lines, `#` comments.
    EdgeList,
    /// METIS adjacency format with node weights (`fmt` = 10), 1-indexed.
    Metis,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge-list" | "edgelist" | "el" => Ok(GraphFormat::EdgeList),
            "metis" | "metis-weighted" | "graph" => Ok(GraphFormat::Metis),
            other => Err(format!("unknown graph format '{other}'")),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFormat::EdgeList => f.write_str("edge-list"),
            GraphFormat::Metis => f.write_str("metis"),
        }
    }
}

/// Counters for input irregularities that were repaired during construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

impl LoadReport {
    pub fn warnings(&self) -> usize {
        self.self_loops_dropped + self.duplicate_edges_dropped
    }
}

/// Immutable node-weighted undirected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from node weights and an undirected edge list.
    ///
    /// Self-loops are dropped and parallel edges merged; both are counted in
    /// the returned report.
    pub fn from_edges(
        weights: Vec<f64>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Graph, LoadReport), GraphError> {
        let n = weights.len();
        for (node, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(GraphError::BadWeight { node, weight });
            }
        }

        let mut report = LoadReport::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicate_edges_dropped = before - pairs.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        // pairs sorted by (min, max): every list receives its smaller
        // neighbors first, then its larger ones, each run ascending
        for &(u, v) in &pairs {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        debug_assert!((0..n).all(|v| targets[offsets[v]..offsets[v + 1]]
            .windows(2)
            .all(|w| w[0] < w[1])));

        Ok((
            Graph {
                weights,
                offsets,
                targets,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.node_count()
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mean_weight(&self) -> f64 {
        if self.weights.is_empty() {
            0.0
        } else {
            self.total_weight() / self.weights.len() as f64
        }
    }

    /// Adjacency test by binary search in the lower-degree endpoint's list.
    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        assert!(
            u < self.node_count() && v < self.node_count(),
            "node id out of range"
        );
        let (probe, key) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(probe).binary_search(&key).is_ok()
    }

    /// Iterates every undirected edge once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn load(path: impl AsRef<Path>, format: GraphFormat) -> Result<(Graph, LoadReport), GraphError> {
        let reader = BufReader::new(File::open(path)?);
        let (graph, report) = match format {
            GraphFormat::EdgeList => parse_edge_list(reader)?,
            GraphFormat::Metis => parse_metis(reader)?,
        };
        if report.warnings() > 0 {
            log::warn!(
                "input repaired: {} self-loop(s) dropped, {} duplicate edge(s) merged",
                report.self_loops_dropped,
                report.duplicate_edges_dropped
            );
        }
        Ok((graph, report))
    }

    /// Writes the graph in edge-list format. Weights use the shortest
    /// round-trip representation, so reloading yields an identical graph.
    pub fn write_edge_list<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {}", self.node_count(), self.edge_count())?;
        for v in self.nodes() {
            writeln!(out, "w {} {:?}", v, self.weights[v])?;
        }
        for (u, v) in self.edges() {
            writeln!(out, "e {u} {v}")?;
        }
        out.flush()
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.write_edge_list(File::create(path)?)
    }

    /// Writes the graph in METIS format with node weights (`fmt` = 10).
    pub fn write_metis<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {} 10", self.node_count(), self.edge_count())?;
        for v in self.nodes() {
            write!(out, "{:?}", self.weights[v])?;
            for &u in self.neighbors(v) {
                write!(out, " {}", u + 1)?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

fn parse_field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

/// Parses the edge-list format. Missing weights default to 1.0.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadReport), GraphError> {
    let mut n: Option<usize> = None;
    let mut weights = Vec::new();
    let mut edges = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let Some(n) = n else {
            let nodes: usize = parse_field(toks.next(), lineno, "node count")?;
            // the edge count is informational; duplicates may make it differ
            let _: usize = parse_field(toks.next(), lineno, "edge count")?;
            n = Some(nodes);
            weights = vec![1.0; nodes];
            continue;
        };
        match toks.next() {
            Some("w") => {
                let v: usize = parse_field(toks.next(), lineno, "node id")?;
                let w: f64 = parse_field(toks.next(), lineno, "weight")?;
                if v >= n {
                    return Err(parse_err(lineno, format!("node id {v} out of range")));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(parse_err(lineno, format!("invalid weight {w}")));
                }
                weights[v] = w;
            }
            Some("e") => {
                let u: usize = parse_field(toks.next(), lineno, "edge endpoint")?;
                let v: usize = parse_field(toks.next(), lineno, "edge endpoint")?;
                if u >= n || v >= n {
                    return Err(parse_err(lineno, format!("edge ({u}, {v}) out of range")));
                }
                edges.push((u, v));
            }
            Some(tag) => return Err(parse_err(lineno, format!("unknown record '{tag}'"))),
            None => unreachable!(),
        }
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens"));
        }
    }

    if n.is_none() {
        return Err(parse_err(0, "missing header"));
    }
    Graph::from_edges(weights, edges)
}

/// Parses METIS adjacency format. `fmt` may be absent/0 (unit weights),
/// 10 (node weights) or 11 (node and edge weights; edge weights ignored).
pub fn parse_metis<R: BufRead>(reader: R) -> Result<(Graph, LoadReport), GraphError> {
    let mut header: Option<(usize, bool, bool)> = None;
    let mut weights = Vec::new();
    let mut edges = Vec::new();
    let mut vertex = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim_start().starts_with('%') {
            continue;
        }
        let Some((n, node_weights, edge_weights)) = header else {
            if line.trim().is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let n: usize = parse_field(toks.next(), lineno, "node count")?;
            let _: usize = parse_field(toks.next(), lineno, "edge count")?;
            let fmt = toks.next().unwrap_or("0");
            let (nw, ew) = match fmt.trim_start_matches('0') {
                "" => (false, false),
                "1" => (false, true),
                "10" => (true, false),
                "11" => (true, true),
                _ => return Err(parse_err(lineno, format!("unsupported METIS fmt '{fmt}'"))),
            };
            if let Some(ncon) = toks.next() {
                if ncon != "1" {
                    return Err(parse_err(lineno, "multi-constraint weights are not supported"));
                }
            }
            header = Some((n, nw, ew));
            weights = vec![1.0; n];
            continue;
        };
        if vertex >= n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_err(lineno, "more vertex lines than declared"));
        }
        let mut toks = line.split_whitespace();
        if node_weights {
            let w: f64 = parse_field(toks.next(), lineno, "node weight")?;
            if !w.is_finite() || w < 0.0 {
                return Err(parse_err(lineno, format!("invalid weight {w}")));
            }
            weights[vertex] = w;
        }
        while let Some(tok) = toks.next() {
            let u: usize = parse_field(Some(tok), lineno, "neighbor id")?;
            if u == 0 || u > n {
                return Err(parse_err(lineno, format!("neighbor id {u} out of range")));
            }
            if edge_weights {
                let _: f64 = parse_field(toks.next(), lineno, "edge weight")?;
            }
            // each edge appears in both lists; keep one copy
            if vertex < u {
                edges.push((vertex, u - 1));
            }
        }
        vertex += 1;
    }

    let Some((n, node_weights, _)) = header else {
        return Err(parse_err(0, "missing header"));
    };
    // unweighted trailing isolated vertices may be lost as stripped blank lines
    if vertex < n && node_weights {
        return Err(parse_err(0, format!("expected {n} vertex lines, found {vertex}")));
    }
    Graph::from_edges(weights, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> Graph {
        let text = "3 2\nw 0 3.0\nw 1 5.0\nw 2 3.0\ne 0 1\ne 1 2\n";
        parse_edge_list(text.as_bytes()).unwrap().0
    }

    #[test]
    fn parses_weighted_path() {
        let g = path3();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weights(), &[3.0, 5.0, 3.0]);
        assert!(g.is_edge(0, 1));
        assert!(!g.is_edge(0, 2));
        assert!(!g.is_edge(1, 1));
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.weight(1), 5.0);
    }

    #[test]
    fn isolated_nodes_and_default_weights() {
        let (g, report) = parse_edge_list("# four isolated\n4 0\n".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.weights(), &[1.0; 4]);
        assert_eq!(report.warnings(), 0);
    }

    #[test]
    fn self_loop_dropped_with_warning() {
        let (g, report) = parse_edge_list("6 1\ne 5 5\n".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(report.self_loops_dropped, 1);
        assert_eq!(report.warnings(), 1);
    }

    #[test]
    fn duplicates_merged() {
        let (g, report) = parse_edge_list("3 3\ne 0 1\ne 1 0\ne 0 1\n".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.duplicate_edges_dropped, 2);
    }

    #[test]
    fn rejects_negative_weight_and_reports_line() {
        let err = parse_edge_list("2 0\nw 0 1.0\nw 1 -2\n".as_bytes()).unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_edge_list("2 0\nw 0 nan\n".as_bytes()).is_err());
        assert!(Graph::from_edges(vec![1.0, f64::INFINITY], []).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_edge_list("3 1\n\ne 0 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
        let err = parse_edge_list("3 1\ne 0 7\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("3 1\nq 0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn metis_weighted() {
        let text = "% path\n3 2 10\n3 2\n5 1 3\n3 2\n";
        let (g, _) = parse_metis(text.as_bytes()).unwrap();
        assert_eq!(g, path3());
    }

    #[test]
    fn metis_unweighted_with_blank_isolated_line() {
        let text = "3 1\n2\n1\n\n";
        let (g, _) = parse_metis(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(2), 0);
    }

    #[test]
    fn metis_rejects_bad_neighbor() {
        assert!(parse_metis("2 1 10\n1 3\n1 1\n".as_bytes()).is_err());
    }

    #[test]
    fn metis_roundtrip() {
        let g = path3();
        let mut buf = Vec::new();
        g.write_metis(&mut buf).unwrap();
        let (h, _) = parse_metis(buf.as_slice()).unwrap();
        assert_eq!(g, h);
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
        (1usize..60).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 0..200),
                prop::collection::vec(0.0f64..1000.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn adjacency_matches_dense_matrix((n, edges, weights) in random_graph()) {
            let (g, _) = Graph::from_edges(weights, edges.clone()).unwrap();
            let mut dense = vec![vec![false; n]; n];
            for &(u, v) in &edges {
                if u != v {
                    dense[u][v] = true;
                    dense[v][u] = true;
                }
            }
            let mut total = 0;
            for u in 0..n {
                let list = g.neighbors(u);
                prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!list.contains(&u));
                total += list.len();
                for v in 0..n {
                    prop_assert_eq!(g.is_edge(u, v), dense[u][v]);
                    prop_assert_eq!(g.is_edge(u, v), g.is_edge(v, u));
                }
            }
            prop_assert_eq!(total, 2 * g.edge_count());
        }

        #[test]
        fn edge_list_roundtrip((_n, edges, weights) in random_graph()) {
            let (g, _) = Graph::from_edges(weights, edges).unwrap();
            let mut buf = Vec::new();
            g.write_edge_list(&mut buf).unwrap();
            let (h, report) = parse_edge_list(buf.as_slice()).unwrap();
            prop_assert_eq!(report.warnings(), 0);
            prop_assert_eq!(g, h);
        }
    }
}
