//! Uncertain graph storage, possible worlds and the edge-list file format.
//!
//! Nodes are dense indices `0..node_count`. Every undirected edge is stored
//! once under its canonical key `(min(u, v), max(u, v))` together with its
//! existence probability. Adjacency lists keep the input edge order, which
//! fixes the BFS order of every traversal in the crate.
//!
//! Edges with probability 0 are kept (so files round-trip) but never appear
//! in the traversal adjacency and are never present in a world.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Smaller endpoint.
    pub u: NodeId,
    /// Larger endpoint.
    pub v: NodeId,
    pub prob: f64,
}

impl Edge {
    pub fn key(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    pub fn is_certain(&self) -> bool {
        self.prob >= 1.0
    }

    pub fn is_uncertain(&self) -> bool {
        self.prob > 0.0 && self.prob < 1.0
    }

    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }
}

pub fn canonical(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected graph whose edges exist independently with a given probability.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct UncertainGraph {
    node_count: usize,
    edges: Vec<Edge>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
}

impl PartialEq for UncertainGraph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges
    }
}

impl UncertainGraph {
    /// Builds a validated graph from `(u, v, p)` triples.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut builder = Builder::new(node_count);
        for (i, (u, v, p)) in edges.into_iter().enumerate() {
            builder
                .push(u, v, p)
                .map_err(|msg| Error::InvalidGraph(format!("edge #{i}: {msg}")))?;
        }
        Ok(builder.finish())
    }

    /// A graph where every listed edge is certain.
    pub fn deterministic<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::new(node_count, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&canonical(u, v)).copied()
    }

    pub fn probability(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.edge_id(u, v).map(|id| self.edges[id].prob)
    }

    /// Neighbors reachable over edges with non-zero probability, in input order.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[node]
    }

    pub fn uncertain_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&id| self.edges[id].is_uncertain())
            .collect()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    /// Reads the edge-list format: an optional `# nodes N` header, then
    /// `u v p` lines. `#` starts a comment anywhere on a line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut triples = Vec::new();
        let mut max_node: Option<NodeId> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if declared.is_none() && triples.is_empty() && words.next() == Some("nodes") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse {
                            line: line_no,
                            message: "malformed `# nodes N` header".into(),
                        })?;
                    declared = Some(n);
                }
                continue;
            }
            let content = trimmed.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `u v p`, found {} fields", fields.len()),
                });
            }
            let node = |s: &str| {
                s.parse::<NodeId>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid node index `{s}`"),
                })
            };
            let u = node(fields[0])?;
            let v = node(fields[1])?;
            let p = fields[2].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid probability `{}`", fields[2]),
            })?;
            max_node = Some(max_node.map_or(u.max(v), |m| m.max(u).max(v)));
            triples.push((line_no, u, v, p));
        }

        let node_count = match declared {
            Some(n) => n,
            None => max_node.map_or(0, |m| m + 1),
        };
        let mut builder = Builder::new(node_count);
        for (line, u, v, p) in triples {
            builder
                .push(u, v, p)
                .map_err(|message| Error::Parse { line, message })?;
        }
        Ok(builder.finish())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Serializes to the edge-list format. Probabilities use the shortest
    /// decimal representation that parses back to the same `f64`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 24);
        let _ = writeln!(out, "# nodes {}", self.node_count);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.prob);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

struct Builder {
    node_count: usize,
    edges: Vec<Edge>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl Builder {
    fn new(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn push(&mut self, u: NodeId, v: NodeId, prob: f64) -> std::result::Result<(), String> {
        if u == v {
            return Err(format!("loop edge {u}-{v}"));
        }
        if u >= self.node_count || v >= self.node_count {
            return Err(format!(
                "edge {u}-{v} references a node outside 0..{}",
                self.node_count
            ));
        }
        if !(0.0..=1.0).contains(&prob) {
            return Err(format!("probability {prob} outside [0, 1]"));
        }
        let key = canonical(u, v);
        if self.index.contains_key(&key) {
            return Err(format!("duplicate edge {}-{}", key.0, key.1));
        }
        self.index.insert(key, self.edges.len());
        self.edges.push(Edge {
            u: key.0,
            v: key.1,
            prob,
        });
        Ok(())
    }

    fn finish(self) -> UncertainGraph {
        let mut adjacency = vec![Vec::new(); self.node_count];
        for (id, e) in self.edges.iter().enumerate() {
            if e.prob > 0.0 {
                adjacency[e.u].push((e.v, id));
                adjacency[e.v].push((e.u, id));
            }
        }
        UncertainGraph {
            node_count: self.node_count,
            edges: self.edges,
            index: self.index,
            adjacency,
        }
    }
}

/// Dense membership set over the edge ids of one graph.
#[derive(Debug, Clone)]
pub struct EdgeSet {
    member: Vec<bool>,
    listed: Vec<EdgeId>,
}

impl EdgeSet {
    pub fn new(edge_count: usize) -> Self {
        Self {
            member: vec![false; edge_count],
            listed: Vec::new(),
        }
    }

    pub fn insert(&mut self, id: EdgeId) -> bool {
        if self.member[id] {
            return false;
        }
        self.member[id] = true;
        self.listed.push(id);
        true
    }

    #[inline]
    pub fn contains(&self, id: EdgeId) -> bool {
        self.member[id]
    }

    pub fn len(&self) -> usize {
        self.listed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.listed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.listed.iter().copied()
    }

    pub fn clear(&mut self) {
        for id in self.listed.drain(..) {
            self.member[id] = false;
        }
    }
}

/// A deterministic instance of an [`UncertainGraph`].
#[derive(Debug, Clone)]
pub struct PossibleWorld<'g> {
    graph: &'g UncertainGraph,
    present: Vec<bool>,
}

impl<'g> PossibleWorld<'g> {
    /// The world containing every edge with non-zero probability.
    pub fn full(graph: &'g UncertainGraph) -> Self {
        let present = graph.edges.iter().map(|e| e.prob > 0.0).collect();
        Self { graph, present }
    }

    /// Only the certain edges.
    pub fn certain_only(graph: &'g UncertainGraph) -> Self {
        let present = graph.edges.iter().map(Edge::is_certain).collect();
        Self { graph, present }
    }

    /// Builds a world from a presence mask indexed by edge id.
    pub fn from_mask(graph: &'g UncertainGraph, present: Vec<bool>) -> Result<Self> {
        if present.len() != graph.edge_count() {
            return Err(Error::InvalidWorld(format!(
                "mask has {} entries, graph has {} edges",
                present.len(),
                graph.edge_count()
            )));
        }
        for (e, &on) in graph.edges.iter().zip(&present) {
            if on && e.prob <= 0.0 {
                return Err(Error::InvalidWorld(format!(
                    "edge {}-{} has probability 0 but is present",
                    e.u, e.v
                )));
            }
            if !on && e.is_certain() {
                return Err(Error::InvalidWorld(format!(
                    "certain edge {}-{} is absent",
                    e.u, e.v
                )));
            }
        }
        Ok(Self { graph, present })
    }

    /// Builds a world from the endpoint pairs of its present edges; certain
    /// edges must be listed too.
    pub fn from_edges<I>(graph: &'g UncertainGraph, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut present = vec![false; graph.edge_count()];
        for (u, v) in pairs {
            let id = graph.edge_id(u, v).ok_or_else(|| {
                Error::InvalidWorld(format!("edge {u}-{v} is not part of the graph"))
            })?;
            present[id] = true;
        }
        Self::from_mask(graph, present)
    }

    pub(crate) fn from_mask_unchecked(graph: &'g UncertainGraph, present: Vec<bool>) -> Self {
        debug_assert_eq!(present.len(), graph.edge_count());
        Self { graph, present }
    }

    pub fn graph(&self) -> &'g UncertainGraph {
        self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count
    }

    #[inline]
    pub fn contains(&self, id: EdgeId) -> bool {
        self.present[id]
    }

    pub fn present_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(id, &on)| on.then_some(id))
    }

    /// Neighbors of `node` in this world, in adjacency order.
    #[inline]
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph.adjacency[node]
            .iter()
            .filter(|&&(_, id)| self.present[id])
            .map(|&(w, _)| w)
    }

    /// `Pr(G)`: product of `p` over present edges and `1 - p` over absent ones.
    pub fn probability(&self) -> f64 {
        self.graph
            .edges
            .iter()
            .zip(&self.present)
            .map(|(e, &on)| if on { e.prob } else { 1.0 - e.prob })
            .product()
    }
}

/// Probability of `world` under `graph`; fails if the world was drawn from a
/// different graph.
pub fn world_probability(graph: &UncertainGraph, world: &PossibleWorld<'_>) -> Result<f64> {
    if !std::ptr::eq(graph, world.graph) && *graph != *world.graph {
        return Err(Error::InvalidWorld(
            "world belongs to a different graph".into(),
        ));
    }
    Ok(world.probability())
}
