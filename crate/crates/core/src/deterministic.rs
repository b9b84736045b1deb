//! Exact shortest-path centralities on a single possible world.

use crate::centrality::{CentralityVector, Method};
use crate::error::{Error, Result};
use crate::graph::{NodeId, PossibleWorld};

pub(crate) const UNREACHED: u32 = u32::MAX;

/// Hop distances from one source; `None` is an unreachable node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    pub source: NodeId,
    pub dist: Vec<Option<usize>>,
}

/// Reusable BFS buffers, one per worker. The world being traversed is first
/// copied into a compact adjacency (`offsets`/`targets`) holding only its
/// present edges.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    pub dist: Vec<u32>,
    pub order: Vec<NodeId>,
    pub sigma: Vec<f64>,
    pub delta: Vec<f64>,
    harmonic: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHED; n],
            order: Vec::with_capacity(n),
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            harmonic: vec![0.0; n],
            offsets: Vec::with_capacity(n + 1),
            targets: Vec::new(),
        }
    }

    fn load(&mut self, world: &PossibleWorld<'_>) {
        self.offsets.clear();
        self.targets.clear();
        self.offsets.push(0);
        for v in 0..world.node_count() {
            self.targets.extend(world.neighbors(v));
            self.offsets.push(self.targets.len());
        }
    }

    /// BFS from `source` over the loaded world; afterwards `order` holds the
    /// reached nodes in visiting order and `dist` their hop counts.
    fn bfs(&mut self, source: NodeId, count_paths: bool) {
        self.dist.fill(UNREACHED);
        self.order.clear();
        if count_paths {
            self.sigma.fill(0.0);
            self.sigma[source] = 1.0;
        }
        self.dist[source] = 0;
        self.order.push(source);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let next = self.dist[v] + 1;
            for &w in &self.targets[self.offsets[v]..self.offsets[v + 1]] {
                if self.dist[w] == UNREACHED {
                    self.dist[w] = next;
                    self.order.push(w);
                }
                if count_paths && self.dist[w] == next {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
    }
}

pub fn bfs_distances(world: &PossibleWorld<'_>, source: NodeId) -> Result<DistanceVector> {
    let n = world.node_count();
    if source >= n {
        return Err(Error::InvalidInput(format!(
            "source {source} out of range 0..{n}"
        )));
    }
    let mut scratch = Scratch::new(n);
    scratch.load(world);
    scratch.bfs(source, false);
    let dist = scratch
        .dist
        .iter()
        .map(|&d| (d != UNREACHED).then_some(d as usize))
        .collect();
    Ok(DistanceVector { source, dist })
}

/// Adds `sum_{s != v} 1/d(s, v)` to `acc[v]` for every node.
pub(crate) fn accumulate_harmonic(
    world: &PossibleWorld<'_>,
    scratch: &mut Scratch,
    acc: &mut [f64],
) {
    scratch.load(world);
    for (v, total) in acc.iter_mut().enumerate() {
        scratch.bfs(v, false);
        let mut sum = 0.0;
        for (s, &d) in scratch.dist.iter().enumerate() {
            if s != v && d != UNREACHED {
                sum += 1.0 / d as f64;
            }
        }
        *total += sum;
    }
}

/// Adds Brandes dependencies summed over all ordered source nodes to `acc`.
/// Every unordered pair is counted twice.
pub(crate) fn accumulate_brandes(
    world: &PossibleWorld<'_>,
    scratch: &mut Scratch,
    acc: &mut [f64],
) {
    scratch.load(world);
    for s in 0..world.node_count() {
        scratch.bfs(s, true);
        scratch.brandes_dependencies(acc);
    }
}

/// [`accumulate_harmonic`] into `harmonic` and [`accumulate_brandes`] into
/// `betweenness` from a single BFS per source. Results are bitwise equal to
/// the separate calls.
pub(crate) fn accumulate_both(
    world: &PossibleWorld<'_>,
    scratch: &mut Scratch,
    harmonic: &mut [f64],
    betweenness: &mut [f64],
) {
    scratch.load(world);
    scratch.harmonic.fill(0.0);
    for s in 0..world.node_count() {
        scratch.bfs(s, true);
        for &v in &scratch.order[1..] {
            scratch.harmonic[v] += 1.0 / scratch.dist[v] as f64;
        }
        scratch.brandes_dependencies(betweenness);
    }
    for (acc, sum) in harmonic.iter_mut().zip(&scratch.harmonic) {
        *acc += sum;
    }
}

impl Scratch {
    /// Backward dependency pass of Brandes after a path-counting BFS.
    fn brandes_dependencies(&mut self, acc: &mut [f64]) {
        let Scratch {
            dist,
            order,
            sigma,
            delta,
            offsets,
            targets,
            ..
        } = self;
        for &v in order.iter() {
            delta[v] = 0.0;
        }
        for &w in order[1..].iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            let parent_dist = dist[w] - 1;
            for &v in &targets[offsets[w]..offsets[w + 1]] {
                if dist[v] == parent_dist {
                    delta[v] += sigma[v] * coeff;
                }
            }
            acc[w] += delta[w];
        }
    }
}

pub(crate) fn check_nodes(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidInput(format!(
            "{what} needs at least {min} nodes, graph has {n}"
        )));
    }
    Ok(())
}

pub(crate) fn betweenness_scale(n: usize) -> f64 {
    1.0 / ((n - 1) as f64 * (n - 2) as f64)
}

/// Normalized harmonic closeness `H(v) = 1/(|V|-1) sum_{s != v} 1/d(s, v)`.
pub fn harmonic_closeness(world: &PossibleWorld<'_>) -> Result<CentralityVector> {
    let n = world.node_count();
    check_nodes(n, 2, "harmonic closeness")?;
    let mut acc = vec![0.0; n];
    accumulate_harmonic(world, &mut Scratch::new(n), &mut acc);
    let norm = 1.0 / (n - 1) as f64;
    acc.iter_mut().for_each(|h| *h *= norm);
    Ok(CentralityVector::new(Method::Harmonic, acc))
}

/// Normalized betweenness via Brandes' dependency accumulation.
pub fn betweenness_brandes(world: &PossibleWorld<'_>) -> Result<CentralityVector> {
    let n = world.node_count();
    check_nodes(n, 3, "betweenness")?;
    let mut acc = vec![0.0; n];
    accumulate_brandes(world, &mut Scratch::new(n), &mut acc);
    // ordered pairs counted twice; 2/((n-1)(n-2)) * acc/2
    let scale = betweenness_scale(n);
    acc.iter_mut().for_each(|b| *b *= scale);
    Ok(CentralityVector::new(Method::Brandes, acc))
}

/// Betweenness by explicit all-pairs path counting. Reference for Brandes.
///
/// `sigma(s,t|v) = sigma(s,v) * sigma(v,t)` whenever `d(s,v) + d(v,t) = d(s,t)`.
pub fn betweenness_naive(world: &PossibleWorld<'_>) -> Result<CentralityVector> {
    let n = world.node_count();
    check_nodes(n, 3, "betweenness")?;
    let mut dist = vec![UNREACHED; n * n];
    let mut sigma = vec![0.0; n * n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        let row = s * n..(s + 1) * n;
        let (d, c) = (&mut dist[row.clone()], &mut sigma[row]);
        d[s] = 0;
        c[s] = 1.0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in world.neighbors(v) {
                if d[w] == UNREACHED {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
                if d[w] == d[v] + 1 {
                    c[w] += c[v];
                }
            }
        }
    }
    let mut scores = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let d_st = dist[s * n + t];
            if d_st == UNREACHED {
                continue;
            }
            let total = sigma[s * n + t];
            for (v, score) in scores.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let (a, b) = (dist[s * n + v], dist[v * n + t]);
                if a != UNREACHED && b != UNREACHED && a + b == d_st {
                    *score += sigma[s * n + v] * sigma[v * n + t] / total;
                }
            }
        }
    }
    let scale = 2.0 * betweenness_scale(n);
    scores.iter_mut().for_each(|b| *b *= scale);
    Ok(CentralityVector::new(Method::NaiveBetweenness, scores))
}
