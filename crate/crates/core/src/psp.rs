//! Possible-shortest-path (PSP) exploration and the PSP centrality heuristics.
//!
//! For a node pair `(s, t)` the graph is treated as deterministic: one round
//! finds every shortest `s`-`t` path among the not-yet-deleted edges, then
//! deletes at least one minimal-probability edge from each of them. Rounds
//! repeat until `s` and `t` are disconnected or the estimated connection
//! probability `phi_st = 1 - prod(1 - Pr(S))` reaches the threshold `phi`.
//!
//! A path `S` found in a round contributes the estimated relative probability
//! `Pr(S) * prod(1 - Pr(G))` over all paths `G` from earlier (shorter) rounds.
//! The harmonic heuristic turns those contributions into an estimated distance
//! distribution; the betweenness heuristic weights the inner nodes of each
//! path with them.
//!
//! Minimal edges are tracked per node during the forward BFS as a single
//! `(edge, prob, depth)` tag. Among equally probable candidates the deeper
//! edge (closer to `t`) wins. A backward traversal from `t` then emits a tag
//! edge wherever it is crossed, which cuts every current shortest path.

use rayon::prelude::*;

use crate::centrality::{CentralityVector, Method};
use crate::deterministic::{self, DistanceVector, UNREACHED};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, NodeId, UncertainGraph};
use crate::parallel::{ordered_block_sum, with_workers};
use crate::worlds::{check_pair, DistanceDistribution};

pub const DEFAULT_PHI: f64 = 0.8;

/// Estimated distribution; same layout as the exact one.
pub type EstimatedDistribution = DistanceDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Only path probabilities are tracked.
    Harmonic,
    /// Paths also carry their inner nodes.
    Betweenness,
}

/// One explored shortest path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub length: usize,
    /// Product of the edge probabilities along the path.
    pub abs_prob: f64,
    /// Nodes strictly between `s` and `t`, in path order.
    pub inner_nodes: Option<Vec<NodeId>>,
}

/// Minimal-probability edge seen on the shortest paths into a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinEdgeTag {
    pub edge: Option<EdgeId>,
    /// `f64::INFINITY` iff `edge` is `None`.
    pub prob: f64,
    pub depth: usize,
}

impl MinEdgeTag {
    pub const NONE: MinEdgeTag = MinEdgeTag {
        edge: None,
        prob: f64::INFINITY,
        depth: 0,
    };
}

/// Result of one all-shortest-paths round.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationRound {
    /// `None` when `t` is unreachable.
    pub length: Option<usize>,
    pub paths: Vec<PathRecord>,
    pub min_edges: Vec<EdgeId>,
}

/// Per-round bookkeeping of a distance-distribution exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSummary {
    pub length: usize,
    pub abs_probs: Vec<f64>,
    /// Sum of the estimated relative probabilities found in this round,
    /// before any capping.
    pub relative_mass: f64,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTrace {
    pub rounds: Vec<RoundSummary>,
    /// Estimated connection probability when exploration stopped.
    pub connection: f64,
}

/// A path under construction during the forward BFS.
trait PartialPath: Sized {
    fn origin() -> Self;
    fn extend(&self, via: NodeId, via_is_source: bool, prob: f64) -> Self;
    fn prob(&self) -> f64;
}

impl PartialPath for f64 {
    fn origin() -> Self {
        1.0
    }

    #[inline]
    fn extend(&self, _via: NodeId, _via_is_source: bool, prob: f64) -> Self {
        prob * self
    }

    fn prob(&self) -> f64 {
        *self
    }
}

#[derive(Debug, Clone)]
struct TrackedPath {
    prob: f64,
    inner: Vec<NodeId>,
}

impl PartialPath for TrackedPath {
    fn origin() -> Self {
        TrackedPath {
            prob: 1.0,
            inner: Vec::new(),
        }
    }

    fn extend(&self, via: NodeId, via_is_source: bool, prob: f64) -> Self {
        let mut inner = Vec::with_capacity(self.inner.len() + 1);
        inner.extend_from_slice(&self.inner);
        if !via_is_source {
            inner.push(via);
        }
        TrackedPath {
            prob: prob * self.prob,
            inner,
        }
    }

    fn prob(&self) -> f64 {
        self.prob
    }
}

/// Reusable per-worker exploration buffers.
struct Explorer<'g, P> {
    graph: &'g UncertainGraph,
    dist: Vec<u32>,
    tags: Vec<MinEdgeTag>,
    paths: Vec<Vec<P>>,
    visited: Vec<bool>,
    touched: Vec<NodeId>,
    queue: Vec<NodeId>,
    deleted: EdgeSet,
    min_edges: Vec<EdgeId>,
}

impl<'g, P: PartialPath> Explorer<'g, P> {
    fn new(graph: &'g UncertainGraph) -> Self {
        let n = graph.node_count();
        Self {
            graph,
            dist: vec![UNREACHED; n],
            tags: vec![MinEdgeTag::NONE; n],
            paths: (0..n).map(|_| Vec::new()).collect(),
            visited: vec![false; n],
            touched: Vec::new(),
            queue: Vec::new(),
            deleted: EdgeSet::new(graph.edge_count()),
            min_edges: Vec::new(),
        }
    }

    fn reset_round(&mut self) {
        for &v in &self.touched {
            self.dist[v] = UNREACHED;
            self.tags[v] = MinEdgeTag::NONE;
            self.visited[v] = false;
            // drop rather than clear: path lists can be huge
            self.paths[v] = Vec::new();
        }
        self.touched.clear();
        self.queue.clear();
        self.min_edges.clear();
    }

    /// Forward BFS from `s` over the non-deleted edges, collecting all
    /// shortest paths into `t` and the min-edge tags. Returns `dist[t]`.
    fn forward(&mut self, s: NodeId, t: NodeId) -> Option<u32> {
        self.reset_round();
        let g = self.graph;
        self.dist[s] = 0;
        self.paths[s].push(P::origin());
        self.touched.push(s);
        self.queue.push(s);
        let mut head = 0;
        while head < self.queue.len() {
            let curr = self.queue[head];
            head += 1;
            if curr == t {
                break;
            }
            let curr_paths = std::mem::take(&mut self.paths[curr]);
            let curr_tag = self.tags[curr];
            let child_dist = self.dist[curr] + 1;
            for &(child, edge) in g.neighbors(curr) {
                if self.deleted.contains(edge) {
                    continue;
                }
                let p = g.edge(edge).prob;
                if self.dist[child] == UNREACHED {
                    self.dist[child] = child_dist;
                    self.queue.push(child);
                    self.touched.push(child);
                    self.paths[child] = curr_paths
                        .iter()
                        .map(|path| path.extend(curr, curr == s, p))
                        .collect();
                    self.tags[child] = if curr_tag.prob >= p {
                        MinEdgeTag {
                            edge: Some(edge),
                            prob: p,
                            depth: child_dist as usize,
                        }
                    } else {
                        curr_tag
                    };
                } else if self.dist[child] == child_dist {
                    let extended = curr_paths
                        .iter()
                        .map(|path| path.extend(curr, curr == s, p));
                    self.paths[child].extend(extended);
                    let child_tag = self.tags[child];
                    if child_tag.prob.min(curr_tag.prob) >= p {
                        self.tags[child] = MinEdgeTag {
                            edge: Some(edge),
                            prob: p,
                            depth: child_dist as usize,
                        };
                    } else if child_tag.prob > curr_tag.prob
                        || (child_tag.prob == curr_tag.prob && curr_tag.depth > child_tag.depth)
                    {
                        self.tags[child] = curr_tag;
                    }
                }
            }
        }
        (self.dist[t] != UNREACHED).then_some(self.dist[t])
    }

    /// One full round: forward pass plus min-edge retrieval. The found paths
    /// are moved out of the explorer.
    fn round(&mut self, s: NodeId, t: NodeId) -> Option<(usize, Vec<P>)> {
        let length = self.forward(s, t)?;
        retrieve_into(
            self.graph,
            t,
            &self.dist,
            &self.tags,
            &self.deleted,
            &mut self.visited,
            &mut self.queue,
            &mut self.min_edges,
        );
        Some((length as usize, std::mem::take(&mut self.paths[t])))
    }

    fn delete_min_edges(&mut self) {
        for &e in &self.min_edges {
            self.deleted.insert(e);
        }
    }

    fn start_pair(&mut self) {
        self.deleted.clear();
    }

    /// Releases the path lists of the finished pair.
    fn end_pair(&mut self) {
        self.reset_round();
        self.deleted.clear();
    }
}

/// Backward traversal from `t` along shortest-path edges. `visited` must be
/// all false on entry; it is left dirty for the nodes touched.
#[allow(clippy::too_many_arguments)]
fn retrieve_into(
    g: &UncertainGraph,
    t: NodeId,
    dist: &[u32],
    tags: &[MinEdgeTag],
    deleted: &EdgeSet,
    visited: &mut [bool],
    queue: &mut Vec<NodeId>,
    out: &mut Vec<EdgeId>,
) {
    out.clear();
    queue.clear();
    if dist[t] == UNREACHED || dist[t] == 0 {
        return;
    }
    visited[t] = true;
    let below_t = dist[t] - 1;
    for &(child, edge) in g.neighbors(t) {
        if deleted.contains(edge) || dist[child] != below_t {
            continue;
        }
        visited[child] = true;
        if g.edge(edge).prob <= tags[child].prob {
            out.push(edge);
        } else {
            queue.push(child);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let curr = queue[head];
        head += 1;
        let Some(below) = dist[curr].checked_sub(1) else {
            continue;
        };
        for &(child, edge) in g.neighbors(curr) {
            if deleted.contains(edge) || dist[child] != below {
                continue;
            }
            if tags[curr].edge == Some(edge) {
                out.push(edge);
            } else if !visited[child] {
                visited[child] = true;
                queue.push(child);
            }
        }
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!(
            "phi must lie in [0, 1], got {phi}"
        )));
    }
    Ok(())
}

fn check_deleted(graph: &UncertainGraph, deleted: &EdgeSet) -> Result<()> {
    if deleted.iter().any(|e| e >= graph.edge_count()) {
        return Err(Error::InvalidInput(
            "deleted edge set does not match the graph".into(),
        ));
    }
    Ok(())
}

/// One all-shortest-paths round between `s` and `t` on `(V, E \ deleted)`.
pub fn all_shortest_paths_round(
    graph: &UncertainGraph,
    s: NodeId,
    t: NodeId,
    deleted: &EdgeSet,
    variant: Variant,
) -> Result<ExplorationRound> {
    check_pair(graph, s, t)?;
    check_deleted(graph, deleted)?;
    fn run<P: PartialPath>(
        graph: &UncertainGraph,
        s: NodeId,
        t: NodeId,
        deleted: &EdgeSet,
        record: impl Fn(P, usize) -> PathRecord,
    ) -> ExplorationRound {
        let mut ex = Explorer::<P>::new(graph);
        for e in deleted.iter() {
            ex.deleted.insert(e);
        }
        match ex.round(s, t) {
            None => ExplorationRound {
                length: None,
                paths: Vec::new(),
                min_edges: Vec::new(),
            },
            Some((length, paths)) => ExplorationRound {
                length: Some(length),
                paths: paths.into_iter().map(|p| record(p, length)).collect(),
                min_edges: std::mem::take(&mut ex.min_edges),
            },
        }
    }
    Ok(match variant {
        Variant::Harmonic => run::<f64>(graph, s, t, deleted, |p, length| PathRecord {
            length,
            abs_prob: p,
            inner_nodes: None,
        }),
        Variant::Betweenness => run::<TrackedPath>(graph, s, t, deleted, |p, length| PathRecord {
            length,
            abs_prob: p.prob,
            inner_nodes: Some(p.inner),
        }),
    })
}

/// Forward pass only: distances from `s` and the min-edge tag of every node
/// settled before `t` was dequeued.
pub fn min_edge_tags(
    graph: &UncertainGraph,
    s: NodeId,
    t: NodeId,
    deleted: &EdgeSet,
) -> Result<(DistanceVector, Vec<MinEdgeTag>)> {
    check_pair(graph, s, t)?;
    check_deleted(graph, deleted)?;
    let mut ex = Explorer::<f64>::new(graph);
    for e in deleted.iter() {
        ex.deleted.insert(e);
    }
    ex.forward(s, t);
    let dist = ex
        .dist
        .iter()
        .map(|&d| (d != UNREACHED).then_some(d as usize))
        .collect();
    Ok((DistanceVector { source: s, dist }, ex.tags))
}

/// Edges to delete after a round: walks back from `t` over edges with
/// `dist[child] = dist[curr] - 1` and emits a node's tag edge when it is
/// crossed. At `t` itself an incident edge is emitted when its probability
/// does not exceed the tag of the node it leads to.
pub fn retrieve_min_edges(
    graph: &UncertainGraph,
    t: NodeId,
    dist: &DistanceVector,
    tags: &[MinEdgeTag],
    deleted: &EdgeSet,
) -> Result<Vec<EdgeId>> {
    let n = graph.node_count();
    if dist.dist.len() != n || tags.len() != n || t >= n {
        return Err(Error::InvalidInput(
            "distance and tag vectors must cover every node".into(),
        ));
    }
    check_deleted(graph, deleted)?;
    let raw: Vec<u32> = dist
        .dist
        .iter()
        .map(|d| d.map_or(UNREACHED, |d| d as u32))
        .collect();
    let mut visited = vec![false; n];
    let mut queue = Vec::new();
    let mut out = Vec::new();
    retrieve_into(
        graph,
        t,
        &raw,
        tags,
        deleted,
        &mut visited,
        &mut queue,
        &mut out,
    );
    Ok(out)
}

fn distribution_with<P: PartialPath>(
    ex: &mut Explorer<'_, P>,
    s: NodeId,
    t: NodeId,
    phi: f64,
    mut trace: Option<&mut PairTrace>,
) -> EstimatedDistribution {
    let n = ex.graph.node_count();
    let mut out = DistanceDistribution::empty(s, t, n);
    ex.start_pair();
    let mut negated_product = 1.0;
    let mut accumulated = 0.0;
    let mut connection = 0.0;
    while connection < phi {
        let Some((length, paths)) = ex.round(s, t) else {
            break;
        };
        let abs_sum: f64 = paths.iter().map(P::prob).sum();
        let relative = negated_product * abs_sum;
        let capped = accumulated + relative >= 1.0;
        if let Some(tr) = trace.as_deref_mut() {
            tr.rounds.push(RoundSummary {
                length,
                abs_probs: paths.iter().map(P::prob).collect(),
                relative_mass: relative,
                capped,
            });
        }
        if capped {
            out.set_mass(length, 1.0 - accumulated);
            if let Some(tr) = trace {
                tr.connection = connection;
            }
            ex.end_pair();
            return out;
        }
        out.set_mass(length, relative);
        accumulated += relative;
        negated_product *= paths.iter().map(|p| 1.0 - p.prob()).product::<f64>();
        connection = 1.0 - negated_product;
        debug_assert!(!ex.min_edges.is_empty());
        if ex.min_edges.is_empty() {
            break;
        }
        ex.delete_min_edges();
    }
    out.set_mass_inf(1.0 - accumulated);
    if let Some(tr) = trace {
        tr.connection = connection;
    }
    ex.end_pair();
    out
}

/// Estimated distance distribution between `s` and `t`.
///
/// Each round's contributions land at that round's path length. If the
/// accumulated mass would reach 1, the current length takes the remainder
/// and exploration stops; otherwise whatever is left when exploration ends
/// goes to infinity.
pub fn psp_distance_distribution(
    graph: &UncertainGraph,
    s: NodeId,
    t: NodeId,
    phi: f64,
) -> Result<EstimatedDistribution> {
    check_pair(graph, s, t)?;
    check_phi(phi)?;
    Ok(distribution_with(
        &mut Explorer::<f64>::new(graph),
        s,
        t,
        phi,
        None,
    ))
}

/// Like [`psp_distance_distribution`], also returning the per-round trace.
pub fn psp_distance_trace(
    graph: &UncertainGraph,
    s: NodeId,
    t: NodeId,
    phi: f64,
) -> Result<(EstimatedDistribution, PairTrace)> {
    check_pair(graph, s, t)?;
    check_phi(phi)?;
    let mut trace = PairTrace {
        rounds: Vec::new(),
        connection: 0.0,
    };
    let d = distribution_with(
        &mut Explorer::<f64>::new(graph),
        s,
        t,
        phi,
        Some(&mut trace),
    );
    Ok((d, trace))
}

/// Expected-reliable distance of the estimated distribution.
pub fn psp_distance_er(graph: &UncertainGraph, s: NodeId, t: NodeId, phi: f64) -> Result<f64> {
    psp_distance_distribution(graph, s, t, phi).map(|d| d.expected_reliable())
}

/// PSP-harmonic closeness of every node.
///
/// Estimated distances are computed once per unordered pair `s < t` (with
/// `s` as the exploration source) into a triangular table, then summed per
/// node in index order.
pub fn psp_harmonic_all(
    graph: &UncertainGraph,
    phi: f64,
    workers: usize,
) -> Result<CentralityVector> {
    let n = graph.node_count();
    deterministic::check_nodes(n, 2, "PSP-harmonic")?;
    check_phi(phi)?;
    let rows: Vec<Vec<f64>> = with_workers(workers, || {
        (0..n - 1)
            .into_par_iter()
            .with_max_len(1)
            .map_init(
                || Explorer::<f64>::new(graph),
                |ex, s| {
                    (s + 1..n)
                        .map(|t| distribution_with(ex, s, t, phi, None).expected_reliable())
                        .collect()
                },
            )
            .collect()
    })?;
    let distance = |a: NodeId, b: NodeId| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        rows[lo][hi - lo - 1]
    };
    let norm = 1.0 / (n - 1) as f64;
    let scores = (0..n)
        .map(|v| {
            let mut sum = 0.0;
            for s in (0..n).filter(|&s| s != v) {
                let d = distance(s, v);
                if d.is_finite() {
                    sum += 1.0 / d;
                }
            }
            sum * norm
        })
        .collect();
    Ok(CentralityVector::new(Method::PspHarmonic, scores).with_phi(phi))
}

/// Adds `sigma(s,t|v) / sigma(s,t) * phi_st` for all pairs `(s, t > s)` to
/// `acc[v]`.
fn betweenness_from_source(
    ex: &mut Explorer<'_, TrackedPath>,
    pair_share: &mut [f64],
    marked: &mut [bool],
    s: NodeId,
    phi: f64,
    acc: &mut [f64],
) {
    let n = ex.graph.node_count();
    let mut on_paths: Vec<NodeId> = Vec::new();
    for t in s + 1..n {
        ex.start_pair();
        let mut sigma = 0.0;
        let mut negated_product = 1.0;
        let mut connection = 0.0;
        while connection < phi {
            let Some((_, paths)) = ex.round(s, t) else {
                break;
            };
            let mut next_product = negated_product;
            for path in &paths {
                let relative = path.prob * negated_product;
                sigma += relative;
                next_product *= 1.0 - path.prob;
                for &v in &path.inner {
                    if !marked[v] {
                        marked[v] = true;
                        on_paths.push(v);
                    }
                    pair_share[v] += relative;
                }
            }
            negated_product = next_product;
            connection = 1.0 - negated_product;
            if ex.min_edges.is_empty() {
                break;
            }
            ex.delete_min_edges();
        }
        if sigma != 0.0 {
            for &v in &on_paths {
                acc[v] += pair_share[v] / sigma * connection;
            }
        }
        for v in on_paths.drain(..) {
            pair_share[v] = 0.0;
            marked[v] = false;
        }
        ex.end_pair();
    }
}

/// PSP-betweenness of every node.
///
/// Sources are processed in fixed blocks and the per-block sums are merged in
/// block order, so the result does not depend on `workers`.
pub fn psp_betweenness_all(
    graph: &UncertainGraph,
    phi: f64,
    workers: usize,
) -> Result<CentralityVector> {
    let n = graph.node_count();
    deterministic::check_nodes(n, 3, "PSP-betweenness")?;
    check_phi(phi)?;
    let block = n.div_ceil(256);
    let sums = with_workers(workers, || {
        ordered_block_sum(n - 1, block, n, |sources, acc| {
            let mut ex = Explorer::<TrackedPath>::new(graph);
            let mut pair_share = vec![0.0; n];
            let mut marked = vec![false; n];
            for s in sources {
                betweenness_from_source(&mut ex, &mut pair_share, &mut marked, s, phi, acc);
            }
        })
    })?;
    let scale = 2.0 * deterministic::betweenness_scale(n);
    Ok(CentralityVector::new(
        Method::PspBetweenness,
        sums.into_iter().map(|b| b * scale).collect(),
    )
    .with_phi(phi))
}
