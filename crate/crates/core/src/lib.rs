//! Maximum-weight independent set heuristics.
//!
//! The solver combines greedy and randomized-greedy construction, a local
//! search over `(*,1)`, `(1,*)`, `(2,*)` and alternating-augmenting-path
//! moves driven by an incrementally maintained interstate graph, optional
//! LP-biased perturbation, and adaptive truncated path relinking around a
//! small elite set. A brute-force oracle is included for verification.

pub mod clock;
pub mod driver;
pub mod generate;
pub mod graph;
pub mod greedy;
pub mod interstate;
pub mod local_search;
pub mod lp_bias;
pub mod oracle;
pub mod relink;
pub mod solution;

pub use graph::{Graph, GraphFormat};
pub use solution::Solution;

/// RNG used throughout the solver; seeded runs are reproducible across
/// platforms.
pub type SolverRng = rand_chacha::ChaCha8Rng;
