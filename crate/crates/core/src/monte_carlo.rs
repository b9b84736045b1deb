//! Monte Carlo estimates of expected harmonic closeness and betweenness.
//!
//! Sample `i` draws its world from a ChaCha8 stream seeded with the master
//! seed and selected by `i`, so every sample is fixed by `(master_seed, i)`
//! alone. Samples are summed in fixed blocks merged in block order, making the
//! output identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::centrality::{CentralityVector, Method};
use crate::deterministic::{self, Scratch};
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::parallel::{default_workers, ordered_block_sum, with_workers};
use crate::worlds::sample_world;

/// Sample count used for harmonic ground truth in the reference experiments.
pub const DEFAULT_HARMONIC_SAMPLES: u64 = 73_777;
/// Sample count used for betweenness on real-world graphs.
pub const DEFAULT_BETWEENNESS_SAMPLES: u64 = 100_000;

const SAMPLE_BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub master_seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, master_seed: u64) -> Self {
        Self {
            samples,
            master_seed,
            workers: default_workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter(
                "sample count must be at least 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter(
                "worker count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Generator for sample `index` under `master_seed`.
pub fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy)]
enum Target {
    Harmonic,
    Betweenness,
    Both,
}

/// Unnormalized sums over all samples; for `Both`, harmonic sums are followed
/// by betweenness sums.
fn sampled_sums(graph: &UncertainGraph, cfg: &McConfig, target: Target) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = graph.node_count();
    let samples = usize::try_from(cfg.samples)
        .map_err(|_| Error::InvalidParameter("sample count too large".into()))?;
    let width = if matches!(target, Target::Both) {
        2 * n
    } else {
        n
    };
    with_workers(cfg.workers, || {
        ordered_block_sum(samples, SAMPLE_BLOCK, width, |range, acc| {
            let mut scratch = Scratch::new(n);
            for index in range {
                let mut rng = sample_rng(cfg.master_seed, index as u64);
                let world = sample_world(graph, &mut rng);
                match target {
                    Target::Harmonic => {
                        deterministic::accumulate_harmonic(&world, &mut scratch, acc)
                    }
                    Target::Betweenness => {
                        deterministic::accumulate_brandes(&world, &mut scratch, acc)
                    }
                    Target::Both => {
                        let (h, b) = acc.split_at_mut(n);
                        deterministic::accumulate_both(&world, &mut scratch, h, b)
                    }
                }
            }
        })
    })
}

fn harmonic_vector(sums: &[f64], cfg: &McConfig) -> CentralityVector {
    let scale = 1.0 / (cfg.samples as f64 * (sums.len() - 1) as f64);
    CentralityVector::new(Method::McHarmonic, sums.iter().map(|x| x * scale).collect())
        .with_samples(cfg.samples, cfg.master_seed)
}

fn betweenness_vector(sums: &[f64], cfg: &McConfig) -> CentralityVector {
    let scale = deterministic::betweenness_scale(sums.len()) / cfg.samples as f64;
    CentralityVector::new(
        Method::McBetweenness,
        sums.iter().map(|x| x * scale).collect(),
    )
    .with_samples(cfg.samples, cfg.master_seed)
}

/// Mean harmonic closeness over `cfg.samples` sampled worlds, normalized by
/// `1 / (r (|V| - 1))`.
pub fn mc_harmonic(graph: &UncertainGraph, cfg: &McConfig) -> Result<CentralityVector> {
    deterministic::check_nodes(graph.node_count(), 2, "harmonic closeness")?;
    let sums = sampled_sums(graph, cfg, Target::Harmonic)?;
    Ok(harmonic_vector(&sums, cfg))
}

/// Mean Brandes betweenness over `cfg.samples` sampled worlds.
pub fn mc_betweenness(graph: &UncertainGraph, cfg: &McConfig) -> Result<CentralityVector> {
    deterministic::check_nodes(graph.node_count(), 3, "betweenness")?;
    let sums = sampled_sums(graph, cfg, Target::Betweenness)?;
    Ok(betweenness_vector(&sums, cfg))
}

/// Both estimates from one pass over the sampled worlds. Identical to
/// calling [`mc_harmonic`] and [`mc_betweenness`] with the same config.
pub fn mc_harmonic_and_betweenness(
    graph: &UncertainGraph,
    cfg: &McConfig,
) -> Result<(CentralityVector, CentralityVector)> {
    let n = graph.node_count();
    deterministic::check_nodes(n, 3, "betweenness")?;
    let sums = sampled_sums(graph, cfg, Target::Both)?;
    Ok((
        harmonic_vector(&sums[..n], cfg),
        betweenness_vector(&sums[n..], cfg),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::Measure;
    use crate::deterministic::{betweenness_brandes, harmonic_closeness};
    use crate::graph::PossibleWorld;
    use crate::worlds::{exact_expected_centrality, DEFAULT_WORLD_CAP};

    fn chorded_diamond() -> UncertainGraph {
        UncertainGraph::new(
            4,
            [
                (0, 1, 1.0),
                (0, 2, 0.5),
                (1, 2, 0.5),
                (2, 3, 0.7),
                (1, 3, 0.6),
            ],
        )
        .unwrap()
    }

    #[test]
    fn certain_graph_is_exact() {
        let g = UncertainGraph::deterministic(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let cfg = McConfig::new(10, 1).with_workers(2);
        let w = PossibleWorld::full(&g);
        let h = mc_harmonic(&g, &cfg).unwrap().scores;
        for (a, b) in h.iter().zip(harmonic_closeness(&w).unwrap().scores) {
            assert!((a - b).abs() < 1e-15);
        }
        let b = mc_betweenness(&g, &cfg).unwrap().scores;
        for (a, e) in b.iter().zip(betweenness_brandes(&w).unwrap().scores) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn star_center() {
        let g = UncertainGraph::deterministic(5, (1..5).map(|v| (0, v))).unwrap();
        let b = mc_betweenness(&g, &McConfig::new(3, 9)).unwrap().scores;
        assert!((b[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let g = chorded_diamond();
        let run = |w| mc_harmonic(&g, &McConfig::new(1000, 5).with_workers(w)).unwrap();
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
        let runb = |w| mc_betweenness(&g, &McConfig::new(500, 5).with_workers(w)).unwrap();
        assert_eq!(runb(1), runb(8));
    }

    #[test]
    fn converges_on_single_edge() {
        let g = UncertainGraph::new(2, [(0, 1, 0.5)]).unwrap();
        let h = mc_harmonic(&g, &McConfig::new(200_000, 17)).unwrap().scores;
        assert!(h.iter().all(|x| (x - 0.5).abs() < 0.005), "{h:?}");
    }

    #[test]
    fn converges_on_chorded_diamond() {
        let g = chorded_diamond();
        let cfg = McConfig::new(200_000, 23);
        for (mc, measure) in [
            (mc_harmonic(&g, &cfg).unwrap(), Measure::Harmonic),
            (mc_betweenness(&g, &cfg).unwrap(), Measure::Betweenness),
        ] {
            let exact = exact_expected_centrality(&g, measure, DEFAULT_WORLD_CAP).unwrap();
            for (a, b) in mc.scores.iter().zip(&exact.scores) {
                assert!((a - b).abs() < 0.005, "{measure}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn combined_pass_matches_separate_runs() {
        let g = chorded_diamond();
        let cfg = McConfig::new(3_000, 77).with_workers(3);
        let (h, b) = mc_harmonic_and_betweenness(&g, &cfg).unwrap();
        assert_eq!(h, mc_harmonic(&g, &cfg).unwrap());
        assert_eq!(b, mc_betweenness(&g, &cfg).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let g = chorded_diamond();
        assert!(mc_harmonic(&g, &McConfig::new(0, 1)).is_err());
        assert!(mc_harmonic(&g, &McConfig::new(1, 1).with_workers(0)).is_err());
        let two = UncertainGraph::new(2, [(0, 1, 0.5)]).unwrap();
        assert!(mc_betweenness(&two, &McConfig::new(1, 1)).is_err());
    }

    #[test]
    fn provenance_records_samples_and_seed() {
        let v = mc_harmonic(&chorded_diamond(), &McConfig::new(7, 99)).unwrap();
        assert_eq!(v.provenance.samples, Some(7));
        assert_eq!(v.provenance.seed, Some(99));
        assert_eq!(v.method(), Method::McHarmonic);
    }
}
