//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uncertain_centrality::deterministic::{
    betweenness_brandes, betweenness_naive, harmonic_closeness,
};
use uncertain_centrality::evaluation::{mae, run_sweep, scc, CsvRow, MethodSpec, SweepConfig};
use uncertain_centrality::generators::{gen_ba, gen_er, GenSpec, Model, ProbDist};
use uncertain_centrality::monte_carlo::{mc_betweenness, mc_harmonic};
use uncertain_centrality::psp::{
    psp_betweenness_all, psp_distance_distribution, psp_distance_trace, psp_harmonic_all,
};
use uncertain_centrality::worlds::{exact_distance_distribution, exact_expected_centrality};
use uncertain_centrality::{
    CentralityVector, McConfig, Measure, Method, PossibleWorld, UncertainGraph, DEFAULT_WORLD_CAP,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, expected {want} (tol {tol:e})")
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn diamond() -> UncertainGraph {
    UncertainGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 3, 0.9), (2, 3, 0.9)]).unwrap()
}

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

fn diamond_example() -> Outcome {
    let g = diamond();
    let (d, trace) = psp_distance_trace(&g, 0, 3, 0.8).map_err(err)?;
    ensure(d.mass(2) == 1.0, || {
        format!("estimated mass[2] = {}", d.mass(2))
    })?;
    ensure(trace.rounds.len() == 1 && trace.rounds[0].capped, || {
        format!("expected one capped round, got {:?}", trace.rounds)
    })?;
    close("estimated d_ER", d.expected_reliable(), 2.0, 1e-12)?;
    let exact = exact_distance_distribution(&g, 0, 3, DEFAULT_WORLD_CAP).map_err(err)?;
    close("exact p(2)", exact.mass(2), 0.99, 1e-12)?;
    close("exact p(inf)", exact.mass_inf(), 0.01, 1e-12)?;
    close("exact d_ER", exact.expected_reliable(), 2.0, 1e-12)?;
    Ok(format!(
        "mass[2]=1, d_ER est={} exact={}",
        d.expected_reliable(),
        exact.expected_reliable()
    ))
}

fn chorded_diamond_example() -> Outcome {
    let g = chorded_diamond();
    let (d, trace) = psp_distance_trace(&g, 0, 3, 0.8).map_err(err)?;
    ensure(trace.rounds.len() == 2, || {
        format!("expected 2 rounds, got {}", trace.rounds.len())
    })?;
    let mut first = trace.rounds[0].abs_probs.clone();
    first.sort_by(|a, b| b.total_cmp(a));
    ensure(first.len() == 2, || format!("round 1 paths: {first:?}"))?;
    close("round 1 path A", first[0], 0.6, 1e-9)?;
    close("round 1 path B", first[1], 0.35, 1e-9)?;
    close(
        "round 2 relative",
        trace.rounds[1].relative_mass,
        0.091,
        1e-9,
    )?;
    ensure(trace.rounds[1].capped, || "cap rule did not trigger".into())?;
    close(
        "accumulated + round 2",
        0.95 + trace.rounds[1].relative_mass,
        1.041,
        1e-9,
    )?;
    close("estimated d_ER", d.expected_reliable(), 2.05, 1e-9)?;
    let exact = exact_distance_distribution(&g, 0, 3, DEFAULT_WORLD_CAP).map_err(err)?;
    close("exact p(2)", exact.mass(2), 0.74, 1e-9)?;
    close("exact p(3)", exact.mass(3), 0.07, 1e-9)?;
    close("exact p(inf)", exact.mass_inf(), 0.19, 1e-9)?;
    close("exact d_ER", exact.expected_reliable(), 1.69 / 0.81, 1e-9)?;
    Ok(format!(
        "rounds 0.6/0.35 then 0.091 (capped), d_ER est={} exact={:.5}",
        d.expected_reliable(),
        exact.expected_reliable()
    ))
}

fn star_closed_forms() -> Outcome {
    for n in [3usize, 5, 10, 50] {
        let g = UncertainGraph::deterministic(n, (1..n).map(|v| (0, v))).map_err(err)?;
        let w = PossibleWorld::full(&g);
        let outer_h = n as f64 / (2.0 * (n - 1) as f64);
        let harmonic = [
            harmonic_closeness(&w).map_err(err)?,
            psp_harmonic_all(&g, 0.8, 4).map_err(err)?,
        ];
        let betweenness = [
            betweenness_brandes(&w).map_err(err)?,
            betweenness_naive(&w).map_err(err)?,
            psp_betweenness_all(&g, 0.8, 4).map_err(err)?,
        ];
        for v in &harmonic {
            close(
                &format!("n={n} {} H(center)", v.method()),
                v.scores[0],
                1.0,
                1e-12,
            )?;
            for &x in &v.scores[1..] {
                close(&format!("n={n} {} H(outer)", v.method()), x, outer_h, 1e-12)?;
            }
        }
        for v in &betweenness {
            close(
                &format!("n={n} {} B(center)", v.method()),
                v.scores[0],
                1.0,
                1e-12,
            )?;
            for &x in &v.scores[1..] {
                close(&format!("n={n} {} B(outer)", v.method()), x, 0.0, 1e-12)?;
            }
        }
    }
    Ok("n in {3,5,10,50}".into())
}

fn deterministic_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let g = GenSpec::new(Model::Er { n: 30, p: 0.2 }, ProbDist::Constant(1.0), seed)
            .generate()
            .map_err(err)?;
        let w = PossibleWorld::full(&g);
        let brandes = betweenness_brandes(&w).map_err(err)?.scores;
        let naive = betweenness_naive(&w).map_err(err)?.scores;
        let psp_b = psp_betweenness_all(&g, 0.8, 4).map_err(err)?.scores;
        let harmonic = harmonic_closeness(&w).map_err(err)?.scores;
        let psp_h = psp_harmonic_all(&g, 0.8, 4).map_err(err)?.scores;
        let d = max_diff(&psp_b, &brandes)
            .max(max_diff(&brandes, &naive))
            .max(max_diff(&psp_h, &harmonic));
        ensure(d <= 1e-9, || format!("seed {seed}: max difference {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("50 graphs, max difference {worst:.1e}"))
}

/// Random graph on 6..=10 nodes with at most `max_uncertain` uncertain edges.
fn small_uncertain_graph(rng: &mut ChaCha8Rng, max_uncertain: usize) -> UncertainGraph {
    let n = rng.random_range(6..=10);
    let topology = gen_er(n, rng.random_range(0.25..0.6), rng).unwrap();
    let uncertain = rng.random_range(1..=max_uncertain);
    let mut chosen: Vec<usize> = (0..topology.edge_count()).collect();
    for i in 0..chosen.len() {
        let j = rng.random_range(i..chosen.len());
        chosen.swap(i, j);
    }
    chosen.truncate(uncertain);
    let edges: Vec<_> = topology
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            let p = if chosen.contains(&i) {
                rng.random_range(0.05..0.95)
            } else {
                1.0
            };
            (u, v, p)
        })
        .collect();
    UncertainGraph::new(n, edges).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let g = small_uncertain_graph(&mut rng, 10);
        let cfg = McConfig::new(200_000, 1_000 + case);
        let pairs = [
            (mc_harmonic(&g, &cfg).map_err(err)?, Measure::Harmonic),
            (mc_betweenness(&g, &cfg).map_err(err)?, Measure::Betweenness),
        ];
        for (mc, measure) in pairs {
            let exact = exact_expected_centrality(&g, measure, DEFAULT_WORLD_CAP).map_err(err)?;
            let d = max_diff(&mc.scores, &exact.scores);
            ensure(d <= 0.005, || {
                format!("case {case} {measure}: max |mc - exact| = {d}")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!("30 graphs, max per-node deviation {worst:.5}"))
}

fn distribution_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    let mut g = small_uncertain_graph(&mut rng, 12);
    for case in 0..1000 {
        if case % 10 == 0 {
            g = small_uncertain_graph(&mut rng, 12);
        }
        let n = g.node_count();
        let s = rng.random_range(0..n);
        let t = (s + rng.random_range(1..n)) % n;
        let phi = rng.random_range(0.0..=1.0);
        let exact = exact_distance_distribution(&g, s, t, DEFAULT_WORLD_CAP).map_err(err)?;
        let est = psp_distance_distribution(&g, s, t, phi).map_err(err)?;
        for (what, total) in [("exact", exact.total()), ("estimated", est.total())] {
            let d = (total - 1.0).abs();
            ensure(d <= 1e-9, || {
                format!("case {case} ({s},{t}) {what} total {total}")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!("1000 cases, max |total - 1| = {worst:.1e}"))
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

fn phi_sweep() -> Outcome {
    let cfg = SweepConfig {
        phis: vec![0.8],
        base_seed: 7_000,
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).map_err(err)?;
    let select = |m: Measure| rows.iter().filter(move |r| r.measure == m);
    let scc_b = mean(select(Measure::Betweenness).map(|r| r.scc));
    let mae_b = mean(select(Measure::Betweenness).map(|r| r.mae));
    let scc_h = mean(select(Measure::Harmonic).map(|r| r.scc));

    let mut cells = Vec::new();
    let mut failing_cells = Vec::new();
    for model in &cfg.models {
        for dist in &cfg.prob_dists {
            let cell: Vec<&CsvRow> = rows
                .iter()
                .filter(|r| r.model == model.to_string() && r.prob_dist == dist.to_string())
                .collect();
            let of = |m: Measure, f: fn(&CsvRow) -> f64| {
                mean(cell.iter().filter(|r| r.measure == m).map(|r| f(r)))
            };
            let (cell_scc_b, cell_mae_b) = (
                of(Measure::Betweenness, |r| r.scc),
                of(Measure::Betweenness, |r| r.mae),
            );
            let (cell_scc_h, cell_mae_h) = (
                of(Measure::Harmonic, |r| r.scc),
                of(Measure::Harmonic, |r| r.mae),
            );
            cells.push(format!(
                "    {model} {dist}: SCC_b={cell_scc_b:.4} MAE_b={cell_mae_b:.5} SCC_h={cell_scc_h:.4} MAE_h={cell_mae_h:.5}"
            ));
            if !(cell_scc_b >= 0.9 && cell_scc_h >= 0.7 && cell_mae_b <= 0.01) {
                failing_cells.push(format!("{model} {dist}"));
            }
        }
    }
    println!("{}", cells.join("\n"));

    let summary =
        format!("mean SCC_b={scc_b:.4} SCC_h={scc_h:.4} MAE_b={mae_b:.5} over 60 graphs, every cell within bounds");
    ensure(scc_b >= 0.9 && scc_h >= 0.7 && mae_b <= 0.01, || {
        summary.clone()
    })?;
    ensure(failing_cells.is_empty(), || {
        format!("cells below bounds: {failing_cells:?}")
    })?;
    Ok(summary)
}

fn determinism() -> Outcome {
    let uncertain = {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        small_uncertain_graph(&mut rng, 12)
    };
    let generated = GenSpec::new(Model::Ba { n: 60, m: 3 }, ProbDist::Beta, 9)
        .generate()
        .map_err(err)?;
    let dir = tempfile::tempdir().map_err(err)?;
    let mut files = 0;
    for method in Method::ALL {
        let graph = match method {
            Method::ExactHarmonic | Method::ExactBetweenness => &uncertain,
            _ => &generated,
        };
        for workers in [1, 4] {
            let spec = MethodSpec {
                samples: 2_000,
                seed: 42,
                ..MethodSpec::new(method)
            }
            .with_workers(workers);
            let mut bytes = Vec::new();
            for run in 0..2 {
                let mut v: CentralityVector = spec.compute(graph).map_err(err)?;
                v.provenance.runtime_ms = None;
                let path = dir.path().join(format!("{method}-{workers}-{run}.txt"));
                v.save(&path).map_err(err)?;
                bytes.push(std::fs::read(&path).map_err(err)?);
                files += 1;
            }
            ensure(bytes[0] == bytes[1], || {
                format!("{method} with {workers} workers differs")
            })?;
        }
    }
    Ok(format!(
        "9 methods x workers {{1,4}} x 2 runs, {files} files compared"
    ))
}

fn generator_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for (n, m) in [(500, 5), (50, 5), (100, 3), (1000, 7), (20, 19)] {
        let e = gen_ba(n, m, &mut rng).map_err(err)?.edge_count();
        ensure(e == (n - m) * m + m, || {
            format!("BA({n},{m}) has {e} edges")
        })?;
    }
    let pairs = 500.0 * 499.0 / 2.0;
    let (er_mean, er_sigma) = (0.05 * pairs, (pairs * 0.05 * 0.95_f64).sqrt());
    for _ in 0..10 {
        let e = gen_er(500, 0.05, &mut rng).map_err(err)?.edge_count() as f64;
        ensure((e - er_mean).abs() <= 4.0 * er_sigma, || {
            format!("ER(500,0.05) has {e} edges")
        })?;
    }
    let g = GenSpec::new(Model::Er { n: 450, p: 1.0 }, ProbDist::Beta, 31)
        .generate()
        .map_err(err)?;
    let probs: Vec<f64> = g.edges().iter().map(|e| e.prob).take(100_000).collect();
    let k = probs.len() as f64;
    let m = probs.iter().sum::<f64>() / k;
    let sd = (probs.iter().map(|p| (p - m).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    ensure((0.497..=0.503).contains(&m), || {
        format!("Beta(4,4) mean {m}")
    })?;
    ensure((0.164..=0.169).contains(&sd), || {
        format!("Beta(4,4) sd {sd}")
    })?;
    Ok(format!(
        "BA exact, ER within 4 sigma, Beta(4,4) mean={m:.4} sd={sd:.4}"
    ))
}

fn metric_examples() -> Outcome {
    let tol = 1e-12;
    close(
        "mae identical",
        mae(&[0.3, 0.9], &[0.3, 0.9]).map_err(err)?,
        0.0,
        tol,
    )?;
    close(
        "mae swap",
        mae(&[0.0, 1.0], &[1.0, 0.0]).map_err(err)?,
        1.0,
        tol,
    )?;
    close(
        "mae example",
        mae(&[0.2, 0.4, 0.9], &[0.1, 0.5, 0.6]).map_err(err)?,
        0.5 / 3.0,
        tol,
    )?;
    close(
        "scc identical",
        scc(&[0.1, 0.5, 0.2], &[0.1, 0.5, 0.2]).map_err(err)?,
        1.0,
        tol,
    )?;
    close(
        "scc reversed",
        scc(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).map_err(err)?,
        -1.0,
        tol,
    )?;
    let s = scc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]).map_err(err)?;
    close("scc one swap", s, 1.0 - 6.0 * 2.0 / 60.0, tol)?;
    close("scc one swap", s, 0.8, tol)?;
    Ok("MAE and SCC examples exact".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "diamond worked example",
            limit: Some(Duration::from_secs(1)),
            run: diamond_example,
        },
        Criterion {
            id: 2,
            name: "chorded diamond worked example",
            limit: Some(Duration::from_secs(1)),
            run: chorded_diamond_example,
        },
        Criterion {
            id: 3,
            name: "star-graph closed forms",
            limit: None,
            run: star_closed_forms,
        },
        Criterion {
            id: 4,
            name: "deterministic reduction",
            limit: None,
            run: deterministic_reduction,
        },
        Criterion {
            id: 5,
            name: "Monte Carlo vs exact oracle",
            limit: Some(Duration::from_secs(120)),
            run: oracle_equivalence,
        },
        Criterion {
            id: 6,
            name: "distribution normalization",
            limit: None,
            run: distribution_normalization,
        },
        Criterion {
            id: 7,
            name: "scaled-down phi sweep",
            limit: Some(Duration::from_secs(30 * 60)),
            run: phi_sweep,
        },
        Criterion {
            id: 8,
            name: "determinism",
            limit: None,
            run: determinism,
        },
        Criterion {
            id: 9,
            name: "generator statistics",
            limit: None,
            run: generator_statistics,
        },
        Criterion {
            id: 10,
            name: "metric unit examples",
            limit: None,
            run: metric_examples,
        },
    ];

    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for c in criteria
        .iter()
        .filter(|c| filter.is_empty() || filter.contains(&c.id))
    {
        let started = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = started.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS [{}] {}: {detail} ({elapsed:.2?})", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {}: {detail} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
