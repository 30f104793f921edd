//! Experiment orchestration: per-run generation, evaluation, and aggregation.
//!
//! Fair-comparison contract: within one run index every method consumes the
//! same seed node, and the subgraph/baseline/proposed methods consume the
//! byte-identical random-walk trace. All seeds derive from the master seed up
//! front, so runs can execute in parallel and re-running a configuration
//! reproduces every artifact.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use graphmend::crawl::{
    bfs_crawl, forest_fire_crawl, induced_subgraph, random_walk, snowball_crawl, CrawlBudget,
    SamplingList,
};
use graphmend::gjoka::gjoka_generate;
use graphmend::metrics::{full_report, l1_distance, L1Report, PropertyReport};
use graphmend::restore::{restore, PhaseTimings, RestoreConfig};
use graphmend::Multigraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Method};

const EIG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSeeds {
    pub fraction: f64,
    pub run_idx: usize,
    pub seed_node: u32,
    pub walk_seed: u64,
    pub pipe_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodMeta {
    pub method: String,
    pub generated_nodes: usize,
    pub generated_edges: usize,
    pub gen_total_secs: f64,
    pub gen_rewire_secs: f64,
    pub avg_l1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

struct MethodOutcome {
    method: Method,
    l1: Option<L1Report>,
    gen_total_secs: f64,
    gen_rewire_secs: f64,
    failure: Option<String>,
}

/// Atomic file write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().context("path has no parent")?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().unwrap().to_string_lossy()
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn fraction_tag(f: f64) -> String {
    format!("{:.4}", f).replace('.', "p")
}

pub fn cmd_run(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    let graph = graphmend::graph::load_edge_list(&cfg.dataset)?;
    if !graph.is_connected() {
        eprintln!(
            "note: dataset {} is not connected; crawls may fail to reach budget. \
             Run `prepare` first.",
            cfg.dataset.display()
        );
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    cfg.save(&cfg.out_dir.join("config.resolved.toml"))?;

    eprintln!("dataset: n={} m={}", graph.node_count(), graph.edge_count());
    let t0 = Instant::now();
    let original = full_report(&graph, EIG_TOL)?;
    eprintln!(
        "original property report: {:.1}s",
        t0.elapsed().as_secs_f64()
    );
    original.write_json(cfg.out_dir.join("original.report.json"))?;

    // derive every run's seeds up front, in a fixed order
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut plan: Vec<RunSeeds> = Vec::new();
    for &fraction in &cfg.fractions {
        for run_idx in 0..cfg.runs {
            plan.push(RunSeeds {
                fraction,
                run_idx,
                seed_node: seeder.gen_range(0..graph.node_count() as u32),
                walk_seed: seeder.gen::<u64>(),
                pipe_seed: seeder.gen::<u64>(),
            });
        }
    }

    let results: Vec<(RunSeeds, Vec<MethodMeta>)> = plan
        .par_iter()
        .map(|seeds| {
            let metas = run_one(&graph, &original, cfg, seeds).unwrap_or_else(|e| {
                panic!("run {:?} failed: {e}", (seeds.fraction, seeds.run_idx))
            });
            (seeds.clone(), metas)
        })
        .collect();

    write_aggregate(cfg, &results)?;
    eprintln!("wrote {}", cfg.out_dir.join("aggregate.csv").display());
    Ok(())
}

fn run_one(
    graph: &Multigraph,
    original: &PropertyReport,
    cfg: &ExperimentConfig,
    seeds: &RunSeeds,
) -> anyhow::Result<Vec<MethodMeta>> {
    let dir = cfg.out_dir.join(format!(
        "run_f{}_{:03}",
        fraction_tag(seeds.fraction),
        seeds.run_idx
    ));
    std::fs::create_dir_all(&dir)?;
    write_atomic(
        &dir.join("meta.json"),
        serde_json::to_string_pretty(seeds)?.as_bytes(),
    )?;

    let budget = CrawlBudget::new(seeds.fraction)?;
    let walk: Option<SamplingList> = if cfg.methods.iter().any(|m| m.uses_random_walk()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.walk_seed);
        let walk = random_walk(graph, seeds.seed_node, budget, &mut rng)?;
        walk.write(dir.join("walk.txt"))?;
        Some(walk)
    } else {
        None
    };

    let mut metas = Vec::new();
    for &method in &cfg.methods {
        let outcome = run_method(graph, cfg, seeds, method, walk.as_ref(), &dir)?;
        let meta = finalize_method(original, &dir, outcome)?;
        metas.push(meta);
    }
    Ok(metas)
}

fn run_method(
    graph: &Multigraph,
    cfg: &ExperimentConfig,
    seeds: &RunSeeds,
    method: Method,
    walk: Option<&SamplingList>,
    dir: &Path,
) -> anyhow::Result<(Method, Option<Multigraph>, PhaseTimings, Option<String>)> {
    let budget = CrawlBudget::new(seeds.fraction)?;
    let restore_cfg = RestoreConfig {
        rng_seed: seeds.pipe_seed,
        r_c: cfg.params.rewire_coefficient,
        m_override: cfg.params.collision_threshold,
        ..Default::default()
    };

    // crawl simulation happens outside the generation timer, matching the
    // generation-time definition (construction and rewiring only)
    let result: Result<(Multigraph, PhaseTimings), graphmend::Error> = match method {
        Method::Bfs | Method::Snowball | Method::Ff => {
            let crawl = match method {
                Method::Bfs => bfs_crawl(graph, seeds.seed_node, budget)?,
                Method::Snowball => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seeds.walk_seed ^ 0x5e0f);
                    snowball_crawl(
                        graph,
                        seeds.seed_node,
                        budget,
                        cfg.params.snowball_k,
                        &mut rng,
                    )?
                }
                Method::Ff => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seeds.walk_seed ^ 0xff00);
                    forest_fire_crawl(graph, seeds.seed_node, budget, cfg.params.ff_pf, &mut rng)?
                }
                _ => unreachable!(),
            };
            let t0 = Instant::now();
            let sub = induced_subgraph(&crawl)?;
            let secs = t0.elapsed().as_secs_f64();
            Ok((
                sub.graph,
                PhaseTimings {
                    total_secs: secs,
                    ..Default::default()
                },
            ))
        }
        Method::RwSubgraph => {
            let walk = walk.expect("walk prepared for rw methods");
            let t0 = Instant::now();
            let sub = induced_subgraph(walk)?;
            let secs = t0.elapsed().as_secs_f64();
            Ok((
                sub.graph,
                PhaseTimings {
                    total_secs: secs,
                    ..Default::default()
                },
            ))
        }
        Method::Gjoka => gjoka_generate(walk.expect("walk prepared"), &restore_cfg)
            .map(|out| (out.graph, out.report.timings)),
        Method::Proposed => restore(walk.expect("walk prepared"), &restore_cfg)
            .map(|out| (out.graph, out.report.timings)),
    };

    match result {
        Ok((g, timings)) => {
            g.write_edge_list(dir.join(format!("{}.edges", method.name())))?;
            Ok((method, Some(g), timings, None))
        }
        Err(e @ graphmend::Error::InsufficientCollisions)
        | Err(e @ graphmend::Error::WalkTooShort { .. })
        | Err(e @ graphmend::Error::InvalidSamplingList(_)) => {
            // estimator failure: record, exclude from aggregates
            Ok((method, None, PhaseTimings::default(), Some(e.to_string())))
        }
        Err(e) => Err(e.into()),
    }
}

fn finalize_method(
    original: &PropertyReport,
    dir: &Path,
    outcome: (Method, Option<Multigraph>, PhaseTimings, Option<String>),
) -> anyhow::Result<MethodMeta> {
    let (method, g, timings, failure) = outcome;
    let (gen_nodes, gen_edges) = g
        .as_ref()
        .map(|g| (g.node_count(), g.edge_count()))
        .unwrap_or((0, 0));
    let out = match g {
        Some(g) => {
            let report = full_report(&g, EIG_TOL)?;
            report.write_json(dir.join(format!("{}.report.json", method.name())))?;
            let l1 = l1_distance(original, &report);
            l1.write_csv(dir.join(format!("{}.l1.csv", method.name())))?;
            MethodOutcome {
                method,
                gen_total_secs: timings.total_secs,
                gen_rewire_secs: timings.rewire_secs,
                l1: Some(l1),
                failure: None,
            }
        }
        None => MethodOutcome {
            method,
            l1: None,
            gen_total_secs: 0.0,
            gen_rewire_secs: 0.0,
            failure,
        },
    };

    let meta = MethodMeta {
        method: out.method.name().to_string(),
        generated_nodes: gen_nodes,
        generated_edges: gen_edges,
        gen_total_secs: out.gen_total_secs,
        gen_rewire_secs: out.gen_rewire_secs,
        avg_l1: out.l1.as_ref().map(|l| l.average).unwrap_or(f64::NAN),
        failure: out.failure,
    };
    write_atomic(
        &dir.join(format!("{}.meta.json", out.method.name())),
        serde_json::to_string_pretty(&meta)?.as_bytes(),
    )?;
    Ok(meta)
}

/// Mean/SD rows over the successful runs of every (method, fraction) cell.
fn write_aggregate(
    cfg: &ExperimentConfig,
    results: &[(RunSeeds, Vec<MethodMeta>)],
) -> anyhow::Result<()> {
    // (method, fraction) -> key -> values; values re-read from the per-run L1
    // CSVs so everything in the aggregate is recomputable from artifacts
    let mut cells: BTreeMap<(String, String), BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut failures: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (seeds, metas) in results {
        let dir = cfg.out_dir.join(format!(
            "run_f{}_{:03}",
            fraction_tag(seeds.fraction),
            seeds.run_idx
        ));
        for meta in metas {
            let cell = (meta.method.clone(), format!("{}", seeds.fraction));
            if meta.failure.is_some() {
                *failures.entry(cell).or_insert(0) += 1;
                continue;
            }
            let csv = std::fs::read_to_string(dir.join(format!("{}.l1.csv", meta.method)))?;
            let entry = cells.entry(cell.clone()).or_default();
            for line in csv.lines().skip(1) {
                let (key, value) = line.split_once(',').context("malformed l1 csv")?;
                let key = match key {
                    "average" => "avg_l1",
                    "sd" => "sd_l1",
                    other => other,
                };
                entry
                    .entry(key.to_string())
                    .or_default()
                    .push(value.parse::<f64>()?);
            }
            entry
                .entry("gen_total_secs".into())
                .or_default()
                .push(meta.gen_total_secs);
            entry
                .entry("gen_rewire_secs".into())
                .or_default()
                .push(meta.gen_rewire_secs);
        }
    }

    let mut out = String::from("method,fraction,key,mean,sd,runs_ok,runs_failed\n");
    for ((method, fraction), keys) in &cells {
        let failed = failures
            .get(&(method.clone(), fraction.clone()))
            .copied()
            .unwrap_or(0);
        for (key, values) in keys {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            out.push_str(&format!(
                "{method},{fraction},{key},{mean},{sd},{},{failed}\n",
                values.len()
            ));
        }
    }
    write_atomic(&cfg.out_dir.join("aggregate.csv"), out.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct ResultSet {
    pub label: String,
    pub dataset: PathBuf,
    pub original_nodes: u64,
    /// (method, fraction, key) -> (mean, sd)
    pub cells: BTreeMap<(String, String, String), (f64, f64)>,
}

pub fn load_result_set(dir: &Path) -> anyhow::Result<ResultSet> {
    let cfg = ExperimentConfig::load(&dir.join("config.resolved.toml"))?;
    let original = PropertyReport::read_json(dir.join("original.report.json"))?;
    let text = std::fs::read_to_string(dir.join("aggregate.csv"))
        .with_context(|| format!("missing aggregate.csv under {}", dir.display()))?;
    let mut cells = BTreeMap::new();
    for line in text.lines().skip(1) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() < 5 {
            continue;
        }
        cells.insert(
            (
                parts[0].to_string(),
                parts[1].to_string(),
                parts[2].to_string(),
            ),
            (parts[3].parse::<f64>()?, parts[4].parse::<f64>()?),
        );
    }
    Ok(ResultSet {
        label: dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string()),
        dataset: cfg.dataset,
        original_nodes: original.n,
        cells,
    })
}

pub fn cmd_compare(dirs: &[PathBuf], fraction: Option<f64>) -> anyhow::Result<()> {
    anyhow::ensure!(dirs.len() >= 2, "compare needs at least two result sets");
    let sets: Vec<ResultSet> = dirs
        .iter()
        .map(|d| load_result_set(d))
        .collect::<anyhow::Result<_>>()?;
    for s in &sets[1..] {
        anyhow::ensure!(
            s.dataset == sets[0].dataset && s.original_nodes == sets[0].original_nodes,
            "mismatched datasets: {} vs {}",
            sets[0].dataset.display(),
            s.dataset.display()
        );
    }

    // columns: one per (set, method, fraction) matching the requested fraction
    let mut columns: Vec<(String, &ResultSet, String, String)> = Vec::new();
    for set in &sets {
        let mut seen = std::collections::BTreeSet::new();
        for (method, frac, _) in set.cells.keys() {
            if let Some(want) = fraction {
                if (frac.parse::<f64>().unwrap_or(f64::NAN) - want).abs() > 1e-12 {
                    continue;
                }
            }
            seen.insert((method.clone(), frac.clone()));
        }
        for (method, frac) in seen {
            columns.push((
                format!("{}:{}@{}", set.label, method, frac),
                set,
                method,
                frac,
            ));
        }
    }
    anyhow::ensure!(!columns.is_empty(), "no matching (method, fraction) cells");

    let keys: Vec<&str> = graphmend::metrics::PROPERTY_KEYS.to_vec();
    let width = columns.iter().map(|c| c.0.len()).max().unwrap().max(12);
    print!("{:<10}", "property");
    for (label, ..) in &columns {
        print!(" | {label:>width$}");
    }
    println!();
    for key in keys {
        print!("{key:<10}");
        for (_, set, method, frac) in &columns {
            match set
                .cells
                .get(&(method.clone(), frac.clone(), key.to_string()))
            {
                Some((mean, _)) => print!(" | {mean:>width$.4}"),
                None => print!(" | {:>width$}", "-"),
            }
        }
        println!();
    }
    print!("{:<10}", "avg +- sd");
    for (_, set, method, frac) in &columns {
        let avg = set
            .cells
            .get(&(method.clone(), frac.clone(), "avg_l1".to_string()));
        let sd = set
            .cells
            .get(&(method.clone(), frac.clone(), "sd_l1".to_string()));
        match (avg, sd) {
            (Some((mean, _)), Some((sd, _))) => {
                let cell = format!("{mean:.4} +- {sd:.4}");
                print!(" | {cell:>width$}");
            }
            _ => print!(" | {:>width$}", "-"),
        }
    }
    println!();
    Ok(())
}
