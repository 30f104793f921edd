//! Command-line front end: dataset preparation, crawler simulation,
//! estimation, graph restoration, evaluation, and experiment orchestration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 estimator failure
//! (insufficient collisions / walk too short), 4 I/O error.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use graphmend::crawl::{
    bfs_crawl, forest_fire_crawl, induced_subgraph, random_walk, snowball_crawl, CrawlBudget,
    SamplingList,
};
use graphmend::estimate::{estimate_all, LocalEstimates};
use graphmend::gjoka::gjoka_generate;
use graphmend::graph::{load_edge_list, preprocess};
use graphmend::metrics::{full_report, l1_distance};
use graphmend::restore::{restore, RestoreConfig, RestoreOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use config::{ExperimentConfig, Method};

#[derive(Parser)]
#[command(
    name = "graphmend",
    about = "Restore a social graph from a random-walk sample and evaluate it",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Sampling-list file produced by `crawl` (one `x : n1 n2 ...` line per query).
    #[arg(long)]
    walk: PathBuf,
    /// Output edge-list path for the generated graph.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Rewiring attempts per candidate edge.
    #[arg(long, default_value_t = 500)]
    rewire_coefficient: u64,
    /// Override for the collision threshold M (default 0.025 r).
    #[arg(long)]
    collision_threshold: Option<usize>,
    /// Write a JSON provenance report (targets, counts, timings) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dump the target degree vector and joint degree matrix as text tables.
    #[arg(long)]
    dump_targets: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simplify a raw edge list and keep its largest connected component.
    Prepare {
        input: PathBuf,
        output: PathBuf,
        /// Also write a `dense-id original-label` mapping table.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Simulate a crawler on a prepared graph and write the sampling list.
    Crawl {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        method: CrawlMethod,
        /// Target fraction of queried nodes in (0, 1].
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        out: PathBuf,
        /// Seed node id (default: uniformly random).
        #[arg(long)]
        seed_node: Option<u32>,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Snowball neighbor cap.
        #[arg(long, default_value_t = 50)]
        snowball_k: usize,
        /// Forest-fire forward-burning probability.
        #[arg(long, default_value_t = 0.7)]
        ff_pf: f64,
    },
    /// Estimate the five local structural properties from a sampling list.
    Estimate {
        #[arg(long)]
        walk: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        collision_threshold: Option<usize>,
    },
    /// Build the edge-induced sampled subgraph from a sampling list.
    Subgraph {
        #[arg(long)]
        walk: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restore a graph that preserves the estimates and the sampled subgraph.
    Restore(GenerateArgs),
    /// Generate from the estimates alone (reproducible 2.5K baseline).
    Gjoka(GenerateArgs),
    /// Compute the 12 structural properties of both graphs and their
    /// normalized L1 distances.
    Evaluate {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        generated: PathBuf,
        /// Write reports and the distance table under this path prefix.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Run a full experiment from a TOML configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the dataset path.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Override the method list.
        #[arg(long, value_enum, num_args = 1..)]
        methods: Option<Vec<Method>>,
        /// Override the queried-node fractions.
        #[arg(long, num_args = 1..)]
        fractions: Option<Vec<f64>>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Side-by-side table of two or more result directories.
    Compare {
        dirs: Vec<PathBuf>,
        /// Restrict the table to one queried fraction.
        #[arg(long)]
        fraction: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CrawlMethod {
    Rw,
    Bfs,
    Snowball,
    Ff,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(workers) = std::env::var("GRAPHMEND_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// Exit-code classes: estimator failures 3, i/o 4, everything else is a
/// configuration/usage problem 2.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<graphmend::Error>() {
            return match e {
                graphmend::Error::InsufficientCollisions
                | graphmend::Error::WalkTooShort { .. } => 3,
                graphmend::Error::Io { .. } | graphmend::Error::MalformedLine { .. } => 4,
                _ => 2,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    2
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Prepare { input, output, map } => cmd_prepare(&input, &output, map.as_deref()),
        Command::Crawl {
            graph,
            method,
            fraction,
            out,
            seed_node,
            rng_seed,
            snowball_k,
            ff_pf,
        } => cmd_crawl(
            &graph, method, fraction, &out, seed_node, rng_seed, snowball_k, ff_pf,
        ),
        Command::Estimate {
            walk,
            out,
            collision_threshold,
        } => {
            let list = SamplingList::read(&walk)?;
            let est: LocalEstimates = estimate_all(&list, collision_threshold)?;
            est.write(&out)?;
            println!(
                "n_hat = {:.1}, k_avg_hat = {:.3}, k_max = {}, |P(k)| = {}, |P(k,k')| = {}",
                est.n_hat,
                est.k_avg_hat,
                est.k_max,
                est.p_k.len(),
                est.p_kk.len()
            );
            Ok(())
        }
        Command::Subgraph { walk, out } => {
            let list = SamplingList::read(&walk)?;
            let sub = induced_subgraph(&list)?;
            sub.graph.write_edge_list(&out)?;
            println!(
                "subgraph: n = {} ({} queried, {} visible), m = {}",
                sub.node_count(),
                sub.queried_count(),
                sub.node_count() - sub.queried_count(),
                sub.graph.edge_count()
            );
            Ok(())
        }
        Command::Restore(args) => cmd_generate(&args, false),
        Command::Gjoka(args) => cmd_generate(&args, true),
        Command::Evaluate {
            original,
            generated,
            out_prefix,
        } => cmd_evaluate(&original, &generated, out_prefix.as_deref()),
        Command::Run {
            config,
            dataset,
            methods,
            fractions,
            runs,
            rng_seed,
            out_dir,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(v) = dataset {
                cfg.dataset = v;
            }
            if let Some(v) = methods {
                cfg.methods = v;
            }
            if let Some(v) = fractions {
                cfg.fractions = v;
            }
            if let Some(v) = runs {
                cfg.runs = v;
            }
            if let Some(v) = rng_seed {
                cfg.rng_seed = v;
            }
            if let Some(v) = out_dir {
                cfg.out_dir = v;
            }
            cfg.validate()?;
            runner::cmd_run(&cfg)
        }
        Command::Compare { dirs, fraction } => runner::cmd_compare(&dirs, fraction),
    }
}

fn cmd_prepare(
    input: &std::path::Path,
    output: &std::path::Path,
    map: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let raw = load_edge_list(input)?;
    let prepared = preprocess(&raw)?;
    prepared.write_edge_list(output)?;
    if let Some(map_path) = map {
        let mut table = String::new();
        if let Some(labels) = prepared.labels() {
            for (dense, label) in labels.iter().enumerate() {
                table.push_str(&format!("{dense}\t{label}\n"));
            }
        }
        runner::write_atomic(map_path, table.as_bytes())?;
    }
    println!(
        "n = {}, m = {}",
        prepared.node_count(),
        prepared.edge_count()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_crawl(
    graph: &std::path::Path,
    method: CrawlMethod,
    fraction: f64,
    out: &std::path::Path,
    seed_node: Option<u32>,
    rng_seed: u64,
    snowball_k: usize,
    ff_pf: f64,
) -> anyhow::Result<()> {
    let g = load_edge_list(graph)?;
    let budget = CrawlBudget::new(fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let seed_node = seed_node.unwrap_or_else(|| rng.gen_range(0..g.node_count() as u32));
    let list = match method {
        CrawlMethod::Rw => random_walk(&g, seed_node, budget, &mut rng)?,
        CrawlMethod::Bfs => bfs_crawl(&g, seed_node, budget)?,
        CrawlMethod::Snowball => snowball_crawl(&g, seed_node, budget, snowball_k, &mut rng)?,
        CrawlMethod::Ff => forest_fire_crawl(&g, seed_node, budget, ff_pf, &mut rng)?,
    };
    list.write(out)?;
    println!(
        "queried {} distinct nodes in {} steps from seed {}",
        list.entries
            .iter()
            .map(|e| e.0)
            .collect::<std::collections::HashSet<_>>()
            .len(),
        list.len(),
        seed_node
    );
    Ok(())
}

fn cmd_generate(args: &GenerateArgs, baseline: bool) -> anyhow::Result<()> {
    let list = SamplingList::read(&args.walk)?;
    let cfg = RestoreConfig {
        rng_seed: args.rng_seed,
        r_c: args.rewire_coefficient,
        m_override: args.collision_threshold,
        ..Default::default()
    };
    let out: RestoreOutcome = if baseline {
        gjoka_generate(&list, &cfg)?
    } else {
        restore(&list, &cfg)?
    };
    out.graph.write_edge_list(&args.out)?;

    if let Some(dir) = &args.dump_targets {
        std::fs::create_dir_all(dir)?;
        let mut dv = String::from("k\tn_star\n");
        for (k, c) in &out.report.degree_vector {
            dv.push_str(&format!("{k}\t{c}\n"));
        }
        runner::write_atomic(&dir.join("degree_vector.tsv"), dv.as_bytes())?;
        let mut jdm = String::from("k\tk2\tm_star\n");
        for (a, b, c) in &out.report.jdm {
            jdm.push_str(&format!("{a}\t{b}\t{c}\n"));
        }
        runner::write_atomic(&dir.join("joint_degree_matrix.tsv"), jdm.as_bytes())?;
    }
    if let Some(report_path) = &args.report {
        let doc = serde_json::json!({
            "n_hat": out.report.estimates.n_hat,
            "k_avg_hat": out.report.estimates.k_avg_hat,
            "subgraph_nodes": out.report.subgraph_nodes,
            "subgraph_edges": out.report.subgraph_edges,
            "generated_nodes": out.report.total_nodes,
            "generated_edges": out.report.total_edges,
            "rewire_candidates": out.report.rewire.candidates,
            "rewire_attempts": out.report.rewire.attempts,
            "rewire_accepted": out.report.rewire.accepted,
            "clustering_distance_initial": out.report.rewire.d_initial,
            "clustering_distance_final": out.report.rewire.d_final,
            "timings": out.report.timings,
        });
        runner::write_atomic(report_path, serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    println!(
        "generated n = {}, m = {} ({:.2}s total, {:.2}s rewiring)",
        out.report.total_nodes,
        out.report.total_edges,
        out.report.timings.total_secs,
        out.report.timings.rewire_secs
    );
    Ok(())
}

fn cmd_evaluate(
    original: &std::path::Path,
    generated: &std::path::Path,
    out_prefix: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let g_orig = load_edge_list(original)?;
    let g_gen = load_edge_list(generated)?;
    let rep_orig = full_report(&g_orig, 1e-8)?;
    let rep_gen = full_report(&g_gen, 1e-8)?;
    let l1 = l1_distance(&rep_orig, &rep_gen);
    print!("{}", l1.to_csv_string());
    if !l1.infinite.is_empty() {
        eprintln!("note: infinite distance for {:?}", l1.infinite);
    }
    if let Some(prefix) = out_prefix {
        if let Some(dir) = prefix.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let p = |suffix: &str| -> PathBuf {
            let mut name = prefix
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            name.push_str(suffix);
            prefix.with_file_name(name)
        };
        rep_orig.write_json(p(".original.report.json"))?;
        rep_orig.write_csv(p(".original.report.csv"))?;
        rep_gen.write_json(p(".generated.report.json"))?;
        rep_gen.write_csv(p(".generated.report.csv"))?;
        l1.write_csv(p(".l1.csv"))?;
        rep_gen
            .write_distribution_tables(p(".generated"))
            .context("writing distribution tables")?;
    }
    Ok(())
}
