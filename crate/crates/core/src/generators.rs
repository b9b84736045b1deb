//! Random topologies (Erdős–Rényi, Barabási–Albert, random hyperbolic) and
//! edge-probability assignment.
//!
//! Every generator takes an explicit RNG. [`GenSpec::generate`] seeds a single
//! ChaCha8 stream from its seed, draws the topology from it, then the
//! edge probabilities, so a `GenSpec` always yields the same graph.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, UncertainGraph};

/// An undirected simple graph without probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub node_count: usize,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Topology {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "node count must be at least 1".into(),
        ));
    }
    Ok(())
}

/// G(n, p): each of the `n(n-1)/2` pairs is an edge independently with
/// probability `p`.
pub fn gen_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Topology> {
    check_node_count(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Topology {
        node_count: n,
        edges,
    })
}

/// Preferential attachment without a user seed graph.
///
/// Starts from a cycle on nodes `0..m` (a path when `m <= 2`), then attaches
/// each further node to `m` distinct earlier nodes drawn with probability
/// proportional to their degree. For `m >= 3` the result has `(n - m) m + m`
/// edges.
pub fn gen_ba<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Topology> {
    check_node_count(n)?;
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "attachment count m = {m} must satisfy 1 <= m < n = {n}"
        )));
    }
    let mut edges = Vec::with_capacity(m + (n - m) * m);
    // Every edge contributes both endpoints, so a uniform draw from this list
    // is a degree-proportional draw over nodes.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    let push = |edges: &mut Vec<_>, endpoints: &mut Vec<_>, u: NodeId, v: NodeId| {
        edges.push((u.min(v), u.max(v)));
        endpoints.push(u);
        endpoints.push(v);
    };
    for u in 1..m {
        push(&mut edges, &mut endpoints, u - 1, u);
    }
    if m >= 3 {
        push(&mut edges, &mut endpoints, 0, m - 1);
    }

    let mut chosen = vec![false; n];
    let mut targets = Vec::with_capacity(m);
    for v in m..n {
        targets.clear();
        if endpoints.is_empty() {
            targets.extend(sample_indices(rng, v, m));
        } else {
            while targets.len() < m {
                let t = endpoints[rng.random_range(0..endpoints.len())];
                if !chosen[t] {
                    chosen[t] = true;
                    targets.push(t);
                }
            }
            for &t in &targets {
                chosen[t] = false;
            }
        }
        for &t in &targets {
            push(&mut edges, &mut endpoints, t, v);
        }
    }
    Ok(Topology {
        node_count: n,
        edges,
    })
}

/// Expected average degree of a threshold random hyperbolic graph with `n`
/// nodes, radial dispersion `alpha` and disk radius `r`.
fn rh_expected_degree(n: f64, alpha: f64, r: f64) -> f64 {
    let gamma = 2.0 * alpha + 1.0;
    let xi = (gamma - 1.0) / (gamma - 2.0);
    let inv = 1.0 / alpha;
    let first = (-r / 2.0).exp();
    let second = (-alpha * r).exp()
        * (alpha * (r / 2.0) * ((PI / 4.0) * inv * inv - (PI - 1.0) * inv + (PI - 2.0)) - 1.0);
    (2.0 / PI) * xi * xi * n * (first + second)
}

/// Disk radius giving average degree `k`, found by bisection around the
/// asymptotic estimate `2 ln(n / v)`.
pub fn rh_target_radius(n: usize, k: f64, gamma: f64) -> f64 {
    let alpha = (gamma - 1.0) / 2.0;
    let xi_inv = (gamma - 2.0) / (gamma - 1.0);
    let v = k * (PI / 2.0) * xi_inv * xi_inv;
    let guess = 2.0 * (n as f64 / v).ln();
    let (mut lo, mut hi) = if guess > 0.0 {
        (guess / 2.0, guess * 2.0)
    } else {
        (1e-6, 1.0)
    };
    let mut r = (lo + hi) / 2.0;
    for _ in 0..200 {
        r = (lo + hi) / 2.0;
        let current = rh_expected_degree(n as f64, alpha, r);
        if (current - k).abs() < 1e-6 {
            break;
        }
        if current < k {
            hi = r;
        } else {
            lo = r;
        }
    }
    r
}

/// Threshold random hyperbolic graph: `n` points in a hyperbolic disk whose
/// radius targets average degree `k` and degree exponent `gamma`; two nodes
/// are adjacent when their hyperbolic distance is at most the radius.
pub fn gen_rh<R: Rng + ?Sized>(n: usize, k: f64, gamma: f64, rng: &mut R) -> Result<Topology> {
    check_node_count(n)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "average degree {k} must be positive"
        )));
    }
    if !(gamma > 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "exponent gamma = {gamma} must exceed 2"
        )));
    }
    if n == 1 {
        return Ok(Topology {
            node_count: 1,
            edges: Vec::new(),
        });
    }
    let alpha = (gamma - 1.0) / 2.0;
    let radius = rh_target_radius(n, k, gamma);
    let span = (alpha * radius).cosh() - 1.0;

    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let angle = rng.random::<f64>() * 2.0 * PI;
        let r = (1.0 + rng.random::<f64>() * span).acosh() / alpha;
        points.push((angle, r.cosh(), r.sinh()));
    }

    let threshold = radius.cosh();
    let mut edges = Vec::new();
    for u in 0..n {
        let (au, cu, su) = points[u];
        for (v, &(av, cv, sv)) in points.iter().enumerate().skip(u + 1) {
            if cu * cv - su * sv * (au - av).cos() <= threshold {
                edges.push((u, v));
            }
        }
    }
    Ok(Topology {
        node_count: n,
        edges,
    })
}

/// Distribution of edge existence probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbDist {
    Uniform,
    Beta,
    Constant(f64),
}

impl ProbDist {
    fn validate(self) -> Result<()> {
        match self {
            ProbDist::Constant(c) if !(0.0..=1.0).contains(&c) => Err(Error::InvalidParameter(
                format!("constant probability {c} outside [0, 1]"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ProbDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbDist::Uniform => f.write_str("uniform"),
            ProbDist::Beta => f.write_str("beta"),
            ProbDist::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

/// Accepts `uniform`, `beta` and `constant:<c>`.
impl FromStr for ProbDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dist = match s {
            "uniform" | "uniform01" => ProbDist::Uniform,
            "beta" | "beta44" | "beta(4,4)" => ProbDist::Beta,
            _ => {
                let c = s
                    .strip_prefix("constant:")
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown probability distribution `{s}` (expected uniform, beta or constant:<c>)"
                        ))
                    })?;
                ProbDist::Constant(c)
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Draws an i.i.d. probability for every edge of `topology`.
///
/// `Beta` is Beta(4, 4): mean 1/2, standard deviation 1/6.
pub fn assign_probabilities<R: Rng + ?Sized>(
    topology: &Topology,
    dist: ProbDist,
    rng: &mut R,
) -> Result<UncertainGraph> {
    dist.validate()?;
    let beta = Beta::new(4.0, 4.0).expect("valid shape parameters");
    let probs: Vec<f64> = topology
        .edges
        .iter()
        .map(|_| match dist {
            ProbDist::Uniform => rng.random::<f64>(),
            ProbDist::Beta => beta.sample(rng),
            ProbDist::Constant(c) => c,
        })
        .collect();
    UncertainGraph::new(
        topology.node_count,
        topology
            .edges
            .iter()
            .zip(probs)
            .map(|(&(u, v), p)| (u, v, p)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Er { n: usize, p: f64 },
    Ba { n: usize, m: usize },
    Rh { n: usize, k: f64, gamma: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Er { .. } => "er",
            Model::Ba { .. } => "ba",
            Model::Rh { .. } => "rh",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Model::Er { n, .. } | Model::Ba { n, .. } | Model::Rh { n, .. } => n,
        }
    }

    pub fn topology<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Topology> {
        match *self {
            Model::Er { n, p } => gen_er(n, p, rng),
            Model::Ba { n, m } => gen_ba(n, m, rng),
            Model::Rh { n, k, gamma } => gen_rh(n, k, gamma, rng),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Er { n, p } => write!(f, "er_n{n}_p{p}"),
            Model::Ba { n, m } => write!(f, "ba_n{n}_m{m}"),
            Model::Rh { n, k, gamma } => write!(f, "rh_n{n}_k{k}_gamma{gamma}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub prob: ProbDist,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(model: Model, prob: ProbDist, seed: u64) -> Self {
        Self { model, prob, seed }
    }

    pub fn generate(&self) -> Result<UncertainGraph> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let topology = self.model.topology(&mut rng)?;
        assign_probabilities(&topology, self.prob, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mean_sd(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(5, 0.0, &mut rng(1)).unwrap().edge_count(), 0);
        assert_eq!(gen_er(5, 1.0, &mut rng(1)).unwrap().edge_count(), 10);
        assert_eq!(gen_er(1, 1.0, &mut rng(1)).unwrap().edge_count(), 0);
        assert!(gen_er(5, 1.5, &mut rng(1)).is_err());
        assert!(gen_er(0, 0.5, &mut rng(1)).is_err());
    }

    #[test]
    fn er_edge_count_within_four_sigma() {
        let pairs = 500.0 * 499.0 / 2.0;
        let mean = 0.05 * pairs;
        let sigma = (pairs * 0.05 * 0.95_f64).sqrt();
        for seed in 0..5 {
            let m = gen_er(500, 0.05, &mut rng(seed)).unwrap().edge_count() as f64;
            assert!((m - mean).abs() <= 4.0 * sigma, "seed {seed}: {m}");
        }
    }

    #[test]
    fn ba_edge_counts() {
        assert_eq!(gen_ba(500, 5, &mut rng(3)).unwrap().edge_count(), 2480);
        assert_eq!(gen_ba(50, 5, &mut rng(3)).unwrap().edge_count(), 230);
        assert_eq!(gen_ba(3, 2, &mut rng(3)).unwrap().edge_count(), 3);
        assert_eq!(gen_ba(10, 1, &mut rng(3)).unwrap().edge_count(), 9);
        assert!(gen_ba(5, 5, &mut rng(3)).is_err());
        assert!(gen_ba(5, 0, &mut rng(3)).is_err());
    }

    #[test]
    fn ba_graphs_are_simple() {
        for seed in 0..20 {
            let t = gen_ba(60, 4, &mut rng(seed)).unwrap();
            UncertainGraph::deterministic(t.node_count, t.edges.iter().copied()).unwrap();
        }
    }

    #[test]
    fn ba_tail_heavier_than_er() {
        let ba = gen_ba(2000, 5, &mut rng(11)).unwrap();
        let pairs = 2000.0 * 1999.0 / 2.0;
        let er = gen_er(2000, ba.edge_count() as f64 / pairs, &mut rng(11)).unwrap();
        let max_ba = *ba.degrees().iter().max().unwrap();
        let max_er = *er.degrees().iter().max().unwrap();
        assert!(max_ba > 3 * max_er, "{max_ba} vs {max_er}");
    }

    #[test]
    fn rh_average_degree_near_target() {
        for seed in 0..20 {
            let t = gen_rh(500, 6.0, 3.0, &mut rng(seed)).unwrap();
            let avg = 2.0 * t.edge_count() as f64 / 500.0;
            assert!((4.0..=8.0).contains(&avg), "seed {seed}: {avg}");
        }
    }

    #[test]
    fn rh_degenerate_and_invalid() {
        assert_eq!(gen_rh(1, 6.0, 3.0, &mut rng(0)).unwrap().edge_count(), 0);
        assert!(gen_rh(10, 0.0, 3.0, &mut rng(0)).is_err());
        assert!(gen_rh(10, 6.0, 2.0, &mut rng(0)).is_err());
    }

    #[test]
    fn rh_degree_tail_follows_power_law() {
        let t = gen_rh(5000, 6.0, 3.0, &mut rng(5)).unwrap();
        let deg = t.degrees();
        let kmin = 10.0;
        let tail: Vec<f64> = deg
            .iter()
            .map(|&d| d as f64)
            .filter(|&d| d >= kmin)
            .collect();
        assert!(tail.len() > 100, "tail too small: {}", tail.len());
        // Discrete power-law maximum likelihood estimate of the exponent.
        let exponent =
            1.0 + tail.len() as f64 / tail.iter().map(|d| (d / (kmin - 0.5)).ln()).sum::<f64>();
        let slope = -exponent;
        assert!((-4.0..=-2.0).contains(&slope), "slope {slope}");
    }

    #[test]
    fn uniform_probabilities_mean() {
        let t = Topology {
            node_count: 2,
            edges: vec![(0, 1)],
        };
        let mut r = rng(21);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                assign_probabilities(&t, ProbDist::Uniform, &mut r)
                    .unwrap()
                    .edges()[0]
                    .prob
            })
            .collect();
        let (mean, _) = mean_sd(&xs);
        assert!((0.497..=0.503).contains(&mean), "{mean}");
    }

    #[test]
    fn beta_probabilities_moments() {
        let t = gen_er(450, 1.0, &mut rng(0)).unwrap();
        assert!(t.edge_count() >= 100_000);
        let g = assign_probabilities(&t, ProbDist::Beta, &mut rng(8)).unwrap();
        let xs: Vec<f64> = g.edges().iter().map(|e| e.prob).collect();
        let (mean, sd) = mean_sd(&xs);
        assert!((0.497..=0.503).contains(&mean), "{mean}");
        assert!((0.164..=0.169).contains(&sd), "{sd}");
    }

    #[test]
    fn constant_one_is_certain() {
        let spec = GenSpec::new(Model::Er { n: 30, p: 0.3 }, ProbDist::Constant(1.0), 4);
        let g = spec.generate().unwrap();
        assert!(g.edges().iter().all(|e| e.prob == 1.0));
        assert!(g.uncertain_edges().is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        for model in [
            Model::Er { n: 80, p: 0.1 },
            Model::Ba { n: 80, m: 3 },
            Model::Rh {
                n: 80,
                k: 6.0,
                gamma: 3.0,
            },
        ] {
            let spec = GenSpec::new(model, ProbDist::Beta, 99);
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
            let other = GenSpec { seed: 100, ..spec };
            assert_ne!(spec.generate().unwrap(), other.generate().unwrap());
        }
    }

    #[test]
    fn prob_dist_parsing() {
        assert_eq!("uniform".parse::<ProbDist>().unwrap(), ProbDist::Uniform);
        assert_eq!("beta".parse::<ProbDist>().unwrap(), ProbDist::Beta);
        assert_eq!(
            "constant:0.25".parse::<ProbDist>().unwrap(),
            ProbDist::Constant(0.25)
        );
        assert!("constant:2".parse::<ProbDist>().is_err());
        assert!("gauss".parse::<ProbDist>().is_err());
        for d in [ProbDist::Uniform, ProbDist::Beta, ProbDist::Constant(0.5)] {
            assert_eq!(d.to_string().parse::<ProbDist>().unwrap(), d);
        }
    }
}
