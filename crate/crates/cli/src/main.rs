use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use uncertain_centrality::evaluation::{
    aggregate_rows, run_sweep, write_csv, CsvRow, ExperimentReport, MethodSpec, SweepConfig,
};
use uncertain_centrality::generators::{GenSpec, Model, ProbDist};
use uncertain_centrality::monte_carlo::{DEFAULT_BETWEENNESS_SAMPLES, DEFAULT_HARMONIC_SAMPLES};
use uncertain_centrality::psp::{psp_distance_trace, DEFAULT_PHI};
use uncertain_centrality::worlds::exact_distance_distribution;
use uncertain_centrality::{
    CentralityVector, DistanceDistribution, Measure, Method, UncertainGraph, DEFAULT_WORLD_CAP,
};

/// Centrality estimation on uncertain graphs.
///
/// Graph files are edge lists: an optional `# nodes N` header, then one
/// `u v p` line per undirected edge with 0-based node ids and existence
/// probability p in [0, 1]. Lines starting with `#` are comments.
///
/// Scores files start with `# key value` header lines (method, measure, phi
/// or samples and seed, and runtime_ms when requested) followed by one
/// `node score` line per node.
#[derive(Debug, Parser)]
#[command(name = "ucent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random uncertain graph.
    Generate {
        #[command(subcommand)]
        model: GenerateModel,
    },
    /// Estimated harmonic closeness from possible shortest paths.
    PspHarmonic(PspArgs),
    /// Estimated betweenness from possible shortest paths.
    PspBetweenness(PspArgs),
    /// Monte Carlo harmonic closeness (default 73777 samples).
    McHarmonic(McArgs),
    /// Monte Carlo betweenness (default 100000 samples).
    McBetweenness(McArgs),
    /// Exact expected harmonic closeness by enumerating all possible worlds.
    ExactHarmonic(ExactArgs),
    /// Exact expected betweenness by enumerating all possible worlds.
    ExactBetweenness(ExactArgs),
    /// Distance distribution of one node pair, estimated and optionally exact.
    Distance(DistanceArgs),
    /// Compare two scores files (MAE and Spearman correlation).
    ///
    /// JSON output is one report object with fields measure, mae, scc,
    /// method_a, method_b, runtime_a, runtime_b. CSV output is one row with
    /// columns graph_id, model, prob_dist, measure, method, phi_or_samples,
    /// seed, mae, scc, runtime_ms_heuristic, runtime_ms_baseline.
    Compare(CompareArgs),
    /// Regenerate the worked examples or the random-graph phi sweep.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct GenCommon {
    /// Edge probability distribution: uniform, beta (Beta(4,4)) or constant:<c>.
    #[arg(long, default_value = "uniform", value_parser = parse_prob_dist)]
    prob: ProbDist,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenerateModel {
    /// Erdős–Rényi G(n, p).
    Er {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = parse_unit)]
        p: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Barabási–Albert preferential attachment with m edges per new node.
    Ba {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Threshold random hyperbolic graph with average degree k and exponent gamma.
    Rh {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 6.0)]
        k: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Debug, Args)]
struct RunCommon {
    /// Input graph file.
    graph: PathBuf,
    /// Worker threads.
    #[arg(long, env = "UCENT_WORKERS", default_value_t = default_workers(),
          value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Output scores file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Record the wall-clock runtime in the scores header. Off by default so
    /// that repeated runs produce identical files.
    #[arg(long)]
    record_runtime: bool,
}

#[derive(Debug, Args)]
struct PspArgs {
    #[command(flatten)]
    common: RunCommon,
    /// Connection-probability threshold at which exploration of a pair stops.
    #[arg(long, default_value_t = DEFAULT_PHI, value_parser = parse_unit)]
    phi: f64,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    common: RunCommon,
    /// Number of sampled worlds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    common: RunCommon,
    /// Refuse graphs with more uncertain edges than this.
    #[arg(long, default_value_t = DEFAULT_WORLD_CAP)]
    cap: usize,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    graph: PathBuf,
    source: usize,
    target: usize,
    #[arg(long, default_value_t = DEFAULT_PHI, value_parser = parse_unit)]
    phi: f64,
    /// Also enumerate all possible worlds for the exact distribution.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_WORLD_CAP)]
    cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Heuristic scores file.
    a: PathBuf,
    /// Baseline scores file.
    b: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Values for the descriptive CSV columns.
    #[arg(long, default_value = "")]
    graph_id: String,
    #[arg(long, default_value = "")]
    model: String,
    #[arg(long, default_value = "")]
    prob_dist: String,
    /// Write the CSV header line before the row.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    FigureExamples,
    RandomGraphSweep,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Directory for the generated report files.
    #[arg(long)]
    out: PathBuf,
    /// Graphs per (model, distribution) cell.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    graphs: u64,
    /// Monte Carlo samples for the ground truth.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, env = "UCENT_WORKERS", default_value_t = default_workers(),
          value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Keep runtime columns in the CSV output (makes reruns differ).
    #[arg(long)]
    record_runtime: bool,
}

fn default_workers() -> u64 {
    uncertain_centrality::parallel::default_workers() as u64
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn parse_prob_dist(s: &str) -> std::result::Result<ProbDist, String> {
    s.parse()
        .map_err(|e: uncertain_centrality::Error| e.to_string())
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<UncertainGraph> {
    UncertainGraph::load(path).with_context(|| format!("reading graph {}", path.display()))
}

fn cmd_generate(model: GenerateModel) -> Result<()> {
    let (model, common) = match model {
        GenerateModel::Er { n, p, common } => (Model::Er { n: n as usize, p }, common),
        GenerateModel::Ba { n, m, common } => (
            Model::Ba {
                n: n as usize,
                m: m as usize,
            },
            common,
        ),
        GenerateModel::Rh {
            n,
            k,
            gamma,
            common,
        } => (
            Model::Rh {
                n: n as usize,
                k,
                gamma,
            },
            common,
        ),
    };
    let graph = GenSpec::new(model, common.prob, common.seed).generate()?;
    emit(common.output.as_deref(), &graph.to_edge_list())
}

fn run_method(common: &RunCommon, spec: MethodSpec) -> Result<()> {
    let graph = load_graph(&common.graph)?;
    let mut scores = spec.with_workers(common.workers as usize).compute(&graph)?;
    if !common.record_runtime {
        scores.provenance.runtime_ms = None;
    }
    emit(common.output.as_deref(), &scores.to_scores_file())
}

fn describe(d: &DistanceDistribution) -> String {
    let mut out = String::new();
    for k in 1..=d.max_distance() {
        if d.mass(k) != 0.0 {
            let _ = writeln!(out, "  p({k}) = {}", d.mass(k));
        }
    }
    let _ = writeln!(out, "  p(inf) = {}", d.mass_inf());
    let _ = writeln!(
        out,
        "  d_ER = {}  d_Med = {}  d_Maj = {}",
        d.expected_reliable(),
        d.median(),
        d.majority()
    );
    out
}

fn cmd_distance(args: DistanceArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let (estimated, trace) = psp_distance_trace(&graph, args.source, args.target, args.phi)?;
    let mut out = format!(
        "pair ({}, {}), phi = {}\n",
        args.source, args.target, args.phi
    );
    for (i, round) in trace.rounds.iter().enumerate() {
        let _ = writeln!(
            out,
            "round {}: length {}, path probabilities {:?}, relative mass {}{}",
            i + 1,
            round.length,
            round.abs_probs,
            round.relative_mass,
            if round.capped { " (capped)" } else { "" }
        );
    }
    let _ = writeln!(out, "estimated connection probability {}", trace.connection);
    out.push_str("estimated distribution:\n");
    out.push_str(&describe(&estimated));
    if args.exact {
        let exact = exact_distance_distribution(&graph, args.source, args.target, args.cap)?;
        out.push_str("exact distribution:\n");
        out.push_str(&describe(&exact));
    }
    emit(None, &out)
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let load = |p: &Path| {
        CentralityVector::load(p).with_context(|| format!("reading scores {}", p.display()))
    };
    let (a, b) = (load(&args.a)?, load(&args.b)?);
    let report = ExperimentReport::compare(&a, &b)?;
    match args.format {
        Format::Json => emit(None, &(report.to_json()? + "\n")),
        Format::Csv => {
            let seed = a.provenance.seed.or(b.provenance.seed);
            let row = CsvRow::from_report(args.graph_id, args.model, args.prob_dist, seed, &report);
            let mut buf = Vec::new();
            write_csv(&mut buf, &[row])?;
            let text = String::from_utf8(buf)?;
            let text = if args.header {
                text
            } else {
                text.split_once('\n')
                    .map(|(_, rest)| rest.to_string())
                    .unwrap_or_default()
            };
            emit(None, &text)
        }
    }
}

fn worked_examples() -> Result<String> {
    let diamond = UncertainGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 0.9), (2, 3, 0.9)])?;
    let chorded_diamond = UncertainGraph::new(
        4,
        [
            (0, 1, 1.0),
            (0, 2, 0.5),
            (1, 2, 0.5),
            (2, 3, 0.7),
            (1, 3, 0.6),
        ],
    )?;
    let mut out = String::new();
    for (name, graph) in [("diamond", &diamond), ("chorded diamond", &chorded_diamond)] {
        let (estimated, trace) = psp_distance_trace(graph, 0, 3, DEFAULT_PHI)?;
        let exact = exact_distance_distribution(graph, 0, 3, DEFAULT_WORLD_CAP)?;
        let _ = writeln!(out, "{name}: pair (0, 3), phi = {DEFAULT_PHI}");
        let _ = writeln!(out, "edges:");
        for e in graph.edges() {
            let _ = writeln!(out, "  {} {} {}", e.u, e.v, e.prob);
        }
        for (i, round) in trace.rounds.iter().enumerate() {
            let _ = writeln!(
                out,
                "round {}: length {}, path probabilities {:?}, relative mass {}{}",
                i + 1,
                round.length,
                round.abs_probs,
                round.relative_mass,
                if round.capped { " (capped)" } else { "" }
            );
        }
        out.push_str("estimated distribution:\n");
        out.push_str(&describe(&estimated));
        out.push_str("exact distribution:\n");
        out.push_str(&describe(&exact));
        out.push('\n');
    }
    Ok(out)
}

fn csv_text(rows: &[CsvRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf)?)
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    match args.suite {
        Suite::FigureExamples => {
            let text = worked_examples()?;
            emit(Some(&args.out.join("worked-examples.txt")), &text)?;
            emit(None, &text)
        }
        Suite::RandomGraphSweep => {
            let cfg = SweepConfig {
                graphs_per_cell: args.graphs as usize,
                mc_samples: args.samples,
                base_seed: args.seed,
                workers: args.workers as usize,
                ..SweepConfig::default()
            };
            let mut rows = run_sweep(&cfg)?;
            if !args.record_runtime {
                rows = rows.into_iter().map(CsvRow::without_runtime).collect();
            }
            emit(Some(&args.out.join("sweep.csv")), &csv_text(&rows)?)?;
            let mut report = String::new();
            for measure in [Measure::Harmonic, Measure::Betweenness] {
                let selected: Vec<CsvRow> = rows
                    .iter()
                    .filter(|r| r.measure == measure)
                    .cloned()
                    .collect();
                let summary = aggregate_rows(&selected);
                let name = format!("summary-{measure}.csv");
                emit(Some(&args.out.join(&name)), &csv_text(&summary)?)?;
                for row in &summary {
                    let _ = writeln!(
                        report,
                        "{measure:<11} {:<14} {:<8} phi {:<4} mean MAE {:.5} mean SCC {:.4}",
                        row.model, row.prob_dist, row.phi_or_samples, row.mae, row.scc
                    );
                }
            }
            emit(None, &report)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { model } => cmd_generate(model),
        Command::PspHarmonic(a) => run_method(&a.common, MethodSpec::psp(Measure::Harmonic, a.phi)),
        Command::PspBetweenness(a) => {
            run_method(&a.common, MethodSpec::psp(Measure::Betweenness, a.phi))
        }
        Command::McHarmonic(a) => run_method(
            &a.common,
            MethodSpec::monte_carlo(
                Measure::Harmonic,
                a.samples.unwrap_or(DEFAULT_HARMONIC_SAMPLES),
                a.seed,
            ),
        ),
        Command::McBetweenness(a) => run_method(
            &a.common,
            MethodSpec::monte_carlo(
                Measure::Betweenness,
                a.samples.unwrap_or(DEFAULT_BETWEENNESS_SAMPLES),
                a.seed,
            ),
        ),
        Command::ExactHarmonic(a) => run_method(
            &a.common,
            MethodSpec {
                cap: a.cap,
                ..MethodSpec::new(Method::ExactHarmonic)
            },
        ),
        Command::ExactBetweenness(a) => run_method(
            &a.common,
            MethodSpec {
                cap: a.cap,
                ..MethodSpec::new(Method::ExactBetweenness)
            },
        ),
        Command::Distance(a) => cmd_distance(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("ucent: error: {message}");
            ExitCode::FAILURE
        }
    }
}
