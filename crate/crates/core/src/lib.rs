//! Centrality on uncertain graphs.
//!
//! An uncertain graph assigns every undirected edge an independent existence
//! probability. This crate estimates harmonic closeness and betweenness on
//! such graphs with the possible-shortest-path (PSP) heuristics, and provides
//! the baselines to judge them by: Monte Carlo sampling over possible worlds
//! and an exact oracle that enumerates every world of small graphs.
//!
//! Module map:
//!
//! * [`graph`]: the graph type, possible worlds, edge-list I/O
//! * [`deterministic`]: BFS, harmonic closeness, Brandes and naive betweenness
//! * [`worlds`]: world enumeration and sampling, exact distance distributions
//! * [`psp`]: PSP exploration, estimated distributions, PSP centralities
//! * [`monte_carlo`]: sampled expected centralities
//! * [`generators`]: ER, BA and random hyperbolic graphs with edge probabilities
//! * [`evaluation`]: MAE, Spearman correlation, experiment reports

pub mod centrality;
pub mod deterministic;
pub mod error;
pub mod evaluation;
pub mod generators;
pub mod graph;
pub mod monte_carlo;
pub mod parallel;
pub mod psp;
pub mod worlds;

pub use centrality::{CentralityVector, Measure, Method, Provenance};
pub use error::{Error, Result};
pub use graph::{EdgeId, EdgeSet, NodeId, PossibleWorld, UncertainGraph};
pub use monte_carlo::McConfig;
pub use worlds::{DistanceDistribution, Hops, DEFAULT_WORLD_CAP};
