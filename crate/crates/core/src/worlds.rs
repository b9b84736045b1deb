//! Exact oracle over possible worlds: enumeration, sampling, exact distance
//! distributions and exact expected centralities.

use std::fmt;

use rand::Rng;

use crate::centrality::{CentralityVector, Measure, Method};
use crate::deterministic::{self, Scratch, UNREACHED};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, PossibleWorld, UncertainGraph};
use crate::parallel::ordered_block_sum;

/// Default limit on uncertain edges for exhaustive enumeration (2^20 worlds).
pub const DEFAULT_WORLD_CAP: usize = 20;

const WORLD_BLOCK: usize = 1024;

/// A hop distance that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Hops {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Hops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hops::Finite(k) => write!(f, "{k}"),
            Hops::Infinite => f.write_str("inf"),
        }
    }
}

/// Probability mass over `{1, ..., |V|-1, inf}` for one node pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceDistribution {
    pub s: NodeId,
    pub t: NodeId,
    /// `finite[k - 1]` is the mass at distance `k`.
    finite: Vec<f64>,
    infinite: f64,
}

impl DistanceDistribution {
    /// A distribution with room for distances `1..=node_count-1` and no mass.
    pub fn empty(s: NodeId, t: NodeId, node_count: usize) -> Self {
        Self {
            s,
            t,
            finite: vec![0.0; node_count.saturating_sub(1)],
            infinite: 0.0,
        }
    }

    pub fn from_masses(s: NodeId, t: NodeId, finite: Vec<f64>, infinite: f64) -> Self {
        Self {
            s,
            t,
            finite,
            infinite,
        }
    }

    /// Mass at finite distance `k >= 1`; zero outside the support.
    pub fn mass(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.finite.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn set_mass(&mut self, k: usize, value: f64) {
        self.finite[k - 1] = value;
    }

    pub fn mass_inf(&self) -> f64 {
        self.infinite
    }

    pub fn set_mass_inf(&mut self, value: f64) {
        self.infinite = value;
    }

    /// Largest representable finite distance, `|V| - 1`.
    pub fn max_distance(&self) -> usize {
        self.finite.len()
    }

    pub fn finite_masses(&self) -> &[f64] {
        &self.finite
    }

    pub fn finite_total(&self) -> f64 {
        self.finite.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.finite_total() + self.infinite
    }

    /// Expected distance conditioned on connection; infinite when no finite
    /// mass exists.
    pub fn expected_reliable(&self) -> f64 {
        distance_er(self)
    }

    pub fn median(&self) -> Hops {
        distance_median(self)
    }

    pub fn majority(&self) -> Hops {
        distance_majority(self)
    }
}

/// Expected-reliable distance `sum_k k p(k) / (1 - p(inf))`.
///
/// The denominator is taken as the total finite mass, which equals
/// `1 - p(inf)` for a normalized distribution.
pub fn distance_er(d: &DistanceDistribution) -> f64 {
    let mut connected = 0.0;
    let mut weighted = 0.0;
    for (i, &m) in d.finite.iter().enumerate() {
        connected += m;
        weighted += m * (i + 1) as f64;
    }
    if connected == 0.0 {
        f64::INFINITY
    } else {
        weighted / connected
    }
}

/// Largest `D` with `sum_{k <= D} p(k) <= 1/2`, or 1 when already `p(1) > 1/2`.
pub fn distance_median(d: &DistanceDistribution) -> Hops {
    let mut cumulative = 0.0;
    let mut best = None;
    for (i, &m) in d.finite.iter().enumerate() {
        cumulative += m;
        if cumulative <= 0.5 {
            best = Some(i + 1);
        } else {
            break;
        }
    }
    Hops::Finite(best.unwrap_or(1))
}

/// The most probable distance. Ties go to the smallest finite distance and
/// infinity only wins when strictly more likely than every finite distance.
pub fn distance_majority(d: &DistanceDistribution) -> Hops {
    let mut best: Option<(usize, f64)> = None;
    for (i, &m) in d.finite.iter().enumerate() {
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((i + 1, m));
        }
    }
    match best {
        Some((k, m)) if m >= d.infinite => Hops::Finite(k),
        _ => Hops::Infinite,
    }
}

fn uncertain_within_cap(graph: &UncertainGraph, cap: usize) -> Result<Vec<EdgeId>> {
    let uncertain = graph.uncertain_edges();
    if uncertain.len() > cap || uncertain.len() >= 63 {
        return Err(Error::CapExceeded {
            uncertain: uncertain.len(),
            cap,
        });
    }
    Ok(uncertain)
}

fn world_mask(graph: &UncertainGraph, uncertain: &[EdgeId], index: u64) -> Vec<bool> {
    let mut mask: Vec<bool> = graph.edges().iter().map(|e| e.is_certain()).collect();
    for (bit, &id) in uncertain.iter().enumerate() {
        mask[id] = index >> bit & 1 == 1;
    }
    mask
}

/// Every possible world exactly once, with its probability.
#[derive(Debug, Clone)]
pub struct WorldIter<'g> {
    graph: &'g UncertainGraph,
    uncertain: Vec<EdgeId>,
    next: u64,
    end: u64,
}

impl<'g> Iterator for WorldIter<'g> {
    type Item = (PossibleWorld<'g>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let mask = world_mask(self.graph, &self.uncertain, self.next);
        self.next += 1;
        let world = PossibleWorld::from_mask_unchecked(self.graph, mask);
        let p = world.probability();
        Some((world, p))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for WorldIter<'_> {}

/// Enumerates all `2^k` worlds, `k` being the number of edges with `0 < p < 1`.
pub fn enumerate_worlds(graph: &UncertainGraph, cap: usize) -> Result<WorldIter<'_>> {
    let uncertain = uncertain_within_cap(graph, cap)?;
    let end = 1u64 << uncertain.len();
    Ok(WorldIter {
        graph,
        uncertain,
        next: 0,
        end,
    })
}

/// Sums `Pr(G) * f(G)` over all worlds into a vector of length `width`,
/// partitioning the world index space into fixed blocks.
fn weighted_world_sum<F>(
    graph: &UncertainGraph,
    cap: usize,
    width: usize,
    per_world: F,
) -> Result<Vec<f64>>
where
    F: Fn(&PossibleWorld<'_>, f64, &mut Scratch, &mut [f64]) + Sync,
{
    let uncertain = uncertain_within_cap(graph, cap)?;
    let worlds = 1usize << uncertain.len();
    let n = graph.node_count();
    Ok(ordered_block_sum(
        worlds,
        WORLD_BLOCK,
        width,
        |range, acc| {
            let mut scratch = Scratch::new(n);
            for index in range {
                let world = PossibleWorld::from_mask_unchecked(
                    graph,
                    world_mask(graph, &uncertain, index as u64),
                );
                let p = world.probability();
                if p == 0.0 {
                    continue;
                }
                per_world(&world, p, &mut scratch, acc);
            }
        },
    ))
}

pub(crate) fn check_pair(graph: &UncertainGraph, s: NodeId, t: NodeId) -> Result<()> {
    let n = graph.node_count();
    if s == t {
        return Err(Error::InvalidPair {
            s,
            t,
            reason: "endpoints must differ",
        });
    }
    if s >= n || t >= n {
        return Err(Error::InvalidPair {
            s,
            t,
            reason: "node out of range",
        });
    }
    Ok(())
}

/// `p_{s,t}(k)`: total probability of the worlds where `d(s, t) = k`.
pub fn exact_distance_distribution(
    graph: &UncertainGraph,
    s: NodeId,
    t: NodeId,
    cap: usize,
) -> Result<DistanceDistribution> {
    check_pair(graph, s, t)?;
    let n = graph.node_count();
    // slot 0 collects the disconnected worlds, slot k distance k
    let sums = weighted_world_sum(graph, cap, n, |world, p, _, acc| {
        let d = bfs_to(world, s, t);
        acc[d.unwrap_or(0)] += p;
    })?;
    Ok(DistanceDistribution::from_masses(
        s,
        t,
        sums[1..].to_vec(),
        sums[0],
    ))
}

fn bfs_to(world: &PossibleWorld<'_>, s: NodeId, t: NodeId) -> Option<usize> {
    let n = world.node_count();
    let mut dist = vec![UNREACHED; n];
    let mut queue = Vec::with_capacity(n);
    dist[s] = 0;
    queue.push(s);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        if v == t {
            return Some(dist[v] as usize);
        }
        for w in world.neighbors(v) {
            if dist[w] == UNREACHED {
                dist[w] = dist[v] + 1;
                queue.push(w);
            }
        }
    }
    None
}

/// `E[phi(G)] = sum_G Pr(G) phi(G)` for harmonic closeness or betweenness.
pub fn exact_expected_centrality(
    graph: &UncertainGraph,
    measure: Measure,
    cap: usize,
) -> Result<CentralityVector> {
    let n = graph.node_count();
    deterministic::check_nodes(n, measure.min_nodes(), measure.as_str())?;
    let sums = weighted_world_sum(graph, cap, n, |world, p, scratch, acc| {
        let mut local = vec![0.0; n];
        match measure {
            Measure::Harmonic => deterministic::accumulate_harmonic(world, scratch, &mut local),
            Measure::Betweenness => deterministic::accumulate_brandes(world, scratch, &mut local),
        }
        for (a, x) in acc.iter_mut().zip(local) {
            *a += p * x;
        }
    })?;
    let (method, scale) = match measure {
        Measure::Harmonic => (Method::ExactHarmonic, 1.0 / (n - 1) as f64),
        Measure::Betweenness => (
            Method::ExactBetweenness,
            deterministic::betweenness_scale(n),
        ),
    };
    Ok(CentralityVector::new(
        method,
        sums.into_iter().map(|x| x * scale).collect(),
    ))
}

/// Draws one world: each edge present independently with its probability.
pub fn sample_world<'g, R: Rng + ?Sized>(
    graph: &'g UncertainGraph,
    rng: &mut R,
) -> PossibleWorld<'g> {
    let mask = graph
        .edges()
        .iter()
        .map(|e| {
            if e.is_certain() {
                true
            } else if e.prob <= 0.0 {
                false
            } else {
                rng.random::<f64>() < e.prob
            }
        })
        .collect();
    PossibleWorld::from_mask_unchecked(graph, mask)
}
