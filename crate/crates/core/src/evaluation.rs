//! Comparing centrality vectors: mean absolute error, Spearman rank
//! correlation, experiment reports, and the random-graph φ sweep.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::centrality::{CentralityVector, Measure, Method, Provenance};
use crate::deterministic::{betweenness_brandes, betweenness_naive, harmonic_closeness};
use crate::error::{Error, Result};
use crate::generators::{GenSpec, Model, ProbDist};
use crate::graph::{PossibleWorld, UncertainGraph};
use crate::monte_carlo::{mc_betweenness, mc_harmonic, mc_harmonic_and_betweenness, McConfig};
use crate::parallel::default_workers;
use crate::psp::{psp_betweenness_all, psp_harmonic_all, DEFAULT_PHI};
use crate::worlds::{exact_expected_centrality, DEFAULT_WORLD_CAP};

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `(1/|V|) Σ |a(v) - b(v)|`.
pub fn mae(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Err(Error::InvalidInput("MAE needs at least one node".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// Ranks starting at 1; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// `1 - 6 Σ (R_a(v) - R_b(v))² / (|V| (|V|² - 1))` over average ranks.
pub fn scc(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Err(Error::InvalidInput("SCC needs at least two nodes".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("SCC input contains NaN".into()));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let squared: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(1.0 - 6.0 * squared / (n * (n * n - 1.0)))
}

/// A centrality method together with every parameter it may need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub phi: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub cap: usize,
}

impl MethodSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            phi: DEFAULT_PHI,
            samples: 10_000,
            seed: 0,
            workers: default_workers(),
            cap: DEFAULT_WORLD_CAP,
        }
    }

    pub fn psp(measure: Measure, phi: f64) -> Self {
        let method = match measure {
            Measure::Harmonic => Method::PspHarmonic,
            Measure::Betweenness => Method::PspBetweenness,
        };
        Self {
            phi,
            ..Self::new(method)
        }
    }

    pub fn monte_carlo(measure: Measure, samples: u64, seed: u64) -> Self {
        let method = match measure {
            Measure::Harmonic => Method::McHarmonic,
            Measure::Betweenness => Method::McBetweenness,
        };
        Self {
            samples,
            seed,
            ..Self::new(method)
        }
    }

    pub fn exact(measure: Measure) -> Self {
        let method = match measure {
            Measure::Harmonic => Method::ExactHarmonic,
            Measure::Betweenness => Method::ExactBetweenness,
        };
        Self::new(method)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Runs the method. The deterministic methods treat every edge with
    /// nonzero probability as present. The returned provenance carries the
    /// wall-clock runtime.
    pub fn compute(&self, graph: &UncertainGraph) -> Result<CentralityVector> {
        let started = Instant::now();
        let mc = McConfig::new(self.samples, self.seed).with_workers(self.workers);
        let mut out = match self.method {
            Method::Harmonic => harmonic_closeness(&PossibleWorld::full(graph))?,
            Method::Brandes => betweenness_brandes(&PossibleWorld::full(graph))?,
            Method::NaiveBetweenness => betweenness_naive(&PossibleWorld::full(graph))?,
            Method::PspHarmonic => psp_harmonic_all(graph, self.phi, self.workers)?,
            Method::PspBetweenness => psp_betweenness_all(graph, self.phi, self.workers)?,
            Method::McHarmonic => mc_harmonic(graph, &mc)?,
            Method::McBetweenness => mc_betweenness(graph, &mc)?,
            Method::ExactHarmonic => exact_expected_centrality(graph, Measure::Harmonic, self.cap)?,
            Method::ExactBetweenness => {
                exact_expected_centrality(graph, Measure::Betweenness, self.cap)?
            }
        };
        out.provenance.runtime_ms = Some(started.elapsed().as_secs_f64() * 1e3);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub measure: Measure,
    pub mae: f64,
    pub scc: f64,
    pub method_a: Provenance,
    pub method_b: Provenance,
    pub runtime_a: Option<f64>,
    pub runtime_b: Option<f64>,
}

impl ExperimentReport {
    /// Compares two score vectors of the same measure.
    pub fn compare(a: &CentralityVector, b: &CentralityVector) -> Result<Self> {
        if a.measure != b.measure {
            return Err(Error::InvalidInput(format!(
                "cannot compare {} scores with {} scores",
                a.measure, b.measure
            )));
        }
        Ok(Self {
            measure: a.measure,
            mae: mae(&a.scores, &b.scores)?,
            scc: scc(&a.scores, &b.scores)?,
            method_a: a.provenance.clone(),
            method_b: b.provenance.clone(),
            runtime_a: a.provenance.runtime_ms,
            runtime_b: b.provenance.runtime_ms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs `heuristic` and `baseline` on `graph` and compares them.
pub fn run_experiment(
    graph: &UncertainGraph,
    heuristic: &MethodSpec,
    baseline: &MethodSpec,
) -> Result<ExperimentReport> {
    let a = heuristic.compute(graph)?;
    let b = baseline.compute(graph)?;
    ExperimentReport::compare(&a, &b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub count: usize,
    pub mean_mae: f64,
    pub mean_scc: f64,
}

pub fn summarize(reports: &[ExperimentReport]) -> Result<BatchSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to summarize".into()));
    }
    let count = reports.len();
    Ok(BatchSummary {
        count,
        mean_mae: reports.iter().map(|r| r.mae).sum::<f64>() / count as f64,
        mean_scc: reports.iter().map(|r| r.scc).sum::<f64>() / count as f64,
    })
}

/// One comparison in a batch, in the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub graph_id: String,
    pub model: String,
    pub prob_dist: String,
    pub measure: Measure,
    pub method: Method,
    pub phi_or_samples: String,
    pub seed: Option<u64>,
    pub mae: f64,
    pub scc: f64,
    pub runtime_ms_heuristic: Option<f64>,
    pub runtime_ms_baseline: Option<f64>,
}

impl CsvRow {
    pub fn from_report(
        graph_id: impl Into<String>,
        model: impl Into<String>,
        prob_dist: impl Into<String>,
        seed: Option<u64>,
        report: &ExperimentReport,
    ) -> Self {
        Self {
            graph_id: graph_id.into(),
            model: model.into(),
            prob_dist: prob_dist.into(),
            measure: report.measure,
            method: report.method_a.method,
            phi_or_samples: report.method_a.phi_or_samples(),
            seed,
            mae: report.mae,
            scc: report.scc,
            runtime_ms_heuristic: report.runtime_a,
            runtime_ms_baseline: report.runtime_b,
        }
    }

    pub fn without_runtime(mut self) -> Self {
        self.runtime_ms_heuristic = None;
        self.runtime_ms_baseline = None;
        self
    }
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write>(writer: W, rows: &[CsvRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        out.write_record([
            "graph_id",
            "model",
            "prob_dist",
            "measure",
            "method",
            "phi_or_samples",
            "seed",
            "mae",
            "scc",
            "runtime_ms_heuristic",
            "runtime_ms_baseline",
        ])?;
    }
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// The scaled-down random-graph experiment: for every (model, probability
/// distribution) cell, `graphs_per_cell` seeded graphs are scored by Monte
/// Carlo and by PSP at each `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub models: Vec<Model>,
    pub prob_dists: Vec<ProbDist>,
    pub graphs_per_cell: usize,
    pub phis: Vec<f64>,
    pub mc_samples: u64,
    pub base_seed: u64,
    pub workers: usize,
    pub measures: Vec<Measure>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            models: vec![
                Model::Er { n: 100, p: 0.05 },
                Model::Ba { n: 100, m: 5 },
                Model::Rh {
                    n: 100,
                    k: 6.0,
                    gamma: 3.0,
                },
            ],
            prob_dists: vec![ProbDist::Uniform, ProbDist::Beta],
            graphs_per_cell: 10,
            phis: (1..=10).map(|i| i as f64 / 10.0).collect(),
            mc_samples: 10_000,
            base_seed: 2024,
            workers: default_workers(),
            measures: vec![Measure::Harmonic, Measure::Betweenness],
        }
    }
}

impl SweepConfig {
    /// Generation seed of graph `index` in cell `(model_idx, dist_idx)`.
    pub fn graph_seed(&self, model_idx: usize, dist_idx: usize, index: usize) -> u64 {
        let cell = (model_idx * self.prob_dists.len() + dist_idx) as u64;
        self.base_seed
            .wrapping_add(cell.wrapping_mul(1_000))
            .wrapping_add(index as u64)
    }
}

/// Runs the sweep, one row per (graph, measure, phi). Graph ids have the form
/// `<model>-<dist>-<index>`, and `seed` is the graph's generation seed, which
/// also seeds its Monte Carlo baseline.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for (mi, model) in cfg.models.iter().enumerate() {
        for (di, dist) in cfg.prob_dists.iter().enumerate() {
            for index in 0..cfg.graphs_per_cell {
                let seed = cfg.graph_seed(mi, di, index);
                let graph = GenSpec::new(*model, *dist, seed).generate()?;
                let graph_id = format!("{}-{}-{index}", model.name(), dist);
                let baselines = sweep_baselines(&graph, cfg, seed)?;
                for (&measure, baseline) in cfg.measures.iter().zip(&baselines) {
                    for &phi in &cfg.phis {
                        let heuristic = MethodSpec::psp(measure, phi)
                            .with_workers(cfg.workers)
                            .compute(&graph)?;
                        let report = ExperimentReport::compare(&heuristic, baseline)?;
                        rows.push(CsvRow::from_report(
                            graph_id.clone(),
                            model.to_string(),
                            dist.to_string(),
                            Some(seed),
                            &report,
                        ));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Monte Carlo baselines for `cfg.measures`, sharing sampled worlds when both
/// measures are requested.
fn sweep_baselines(
    graph: &UncertainGraph,
    cfg: &SweepConfig,
    seed: u64,
) -> Result<Vec<CentralityVector>> {
    let mc = McConfig::new(cfg.mc_samples, seed).with_workers(cfg.workers);
    let shared = cfg.measures.contains(&Measure::Harmonic)
        && cfg.measures.contains(&Measure::Betweenness)
        && graph.node_count() >= Measure::Betweenness.min_nodes();
    if !shared {
        return cfg
            .measures
            .iter()
            .map(|&m| {
                MethodSpec::monte_carlo(m, cfg.mc_samples, seed)
                    .with_workers(cfg.workers)
                    .compute(graph)
            })
            .collect();
    }
    let started = Instant::now();
    let (mut harmonic, mut betweenness) = mc_harmonic_and_betweenness(graph, &mc)?;
    // One pass produced both vectors; each is charged half of the time.
    let half = started.elapsed().as_secs_f64() * 1e3 / 2.0;
    harmonic.provenance.runtime_ms = Some(half);
    betweenness.provenance.runtime_ms = Some(half);
    Ok(cfg
        .measures
        .iter()
        .map(|m| match m {
            Measure::Harmonic => harmonic.clone(),
            Measure::Betweenness => betweenness.clone(),
        })
        .collect())
}

/// Mean MAE/SCC per (model, prob_dist, measure, phi_or_samples), in first-seen
/// order. `graph_id` becomes `mean-of-<count>` and runtimes become means.
pub fn aggregate_rows(rows: &[CsvRow]) -> Vec<CsvRow> {
    let mut groups: Vec<(CsvRow, usize)> = Vec::new();
    for row in rows {
        let key = |r: &CsvRow| {
            (
                r.model.clone(),
                r.prob_dist.clone(),
                r.measure,
                r.method,
                r.phi_or_samples.clone(),
            )
        };
        match groups.iter_mut().find(|(g, _)| key(g) == key(row)) {
            Some((acc, count)) => {
                acc.mae += row.mae;
                acc.scc += row.scc;
                acc.runtime_ms_heuristic =
                    add_opt(acc.runtime_ms_heuristic, row.runtime_ms_heuristic);
                acc.runtime_ms_baseline = add_opt(acc.runtime_ms_baseline, row.runtime_ms_baseline);
                if acc.seed != row.seed {
                    acc.seed = None;
                }
                *count += 1;
            }
            None => groups.push((row.clone(), 1)),
        }
    }
    groups
        .into_iter()
        .map(|(mut row, count)| {
            let k = count as f64;
            row.graph_id = format!("mean-of-{count}");
            row.mae /= k;
            row.scc /= k;
            row.runtime_ms_heuristic = row.runtime_ms_heuristic.map(|x| x / k);
            row.runtime_ms_baseline = row.runtime_ms_baseline.map(|x| x / k);
            row
        })
        .collect()
}

fn add_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? + b?)
}
