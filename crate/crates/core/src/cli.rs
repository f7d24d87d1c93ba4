//! `svnkit` command-line frontend.
//!
//! Every command writes into an output directory together with a
//! `manifest.json`. Exit codes: 0 success, 2 usage or validation error,
//! 3 runtime failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::benchmark::{self, BenchmarkSpec, RewirePlan, SwapMode, DEFAULT_SEED};
use crate::community::{
    adjusted_rand, adjusted_wallace, align_partitions, cores_of, louvain_projection, modularity,
    read_partition_tsv, CommunityGraph, EdgeWeights,
};
use crate::corrections::Method;
use crate::disparity::{disparity_backbone, write_backbone_tsv, DegreeOnePolicy, Symmetrize};
use crate::error::{Error, Result};
use crate::experiment::{robustness_experiment, ExperimentConfig};
use crate::graph::{self, load_bipartite, load_weighted, project, save_node_index, write_file, Side};
use crate::manifest::RunManifest;
use crate::svn::{validate_one_tail, validate_two_tail, Family, Tails};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "svnkit", version, about = "Statistically validated networks toolkit")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "SVNKIT_THREADS")]
    pub threads: Option<usize>,
    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Disparity-filter backbone of a weighted network.
    Backbone(BackboneArgs),
    /// Statistically validated projection of a bipartite network.
    Validate(ValidateArgs),
    /// Louvain communities of a projection or of its validated network.
    Communities(CommunitiesArgs),
    /// Adjusted Rand and adjusted Wallace indices between two partitions.
    Compare(CompareArgs),
    /// Generate a planted-block bipartite benchmark, optionally rewired.
    Benchmark(BenchmarkArgs),
    /// Partition robustness under degree-preserving rewiring.
    Experiment(ExperimentArgs),
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie strictly between 0 and 1"))
    }
}

fn parse_probability(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} must lie in [0, 1]"))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BackboneArgs {
    /// Weighted edge list `source<TAB>target<TAB>weight`.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the edge list as directed.
    #[arg(long)]
    pub directed: bool,
    #[arg(long, default_value = "0.05", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "fdr")]
    pub correction: Method,
    #[arg(long = "degree-one", value_enum, default_value = "drop")]
    pub degree_one: DegreeOnePolicy,
    /// Also write an undirected version of the backbone.
    #[arg(long, value_enum)]
    pub symmetrize: Option<Symmetrize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    /// Bipartite edge list `nodeA<TAB>nodeB`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, ignore_case = true, default_value = "A")]
    pub side: Side,
    #[arg(long, value_enum, default_value = "one")]
    pub tails: Tails,
    #[arg(long, default_value = "0.01", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "fdr")]
    pub method: Method,
    /// Two-tail family size: one test per tail (`tests`) or per pair (`pairs`).
    #[arg(long, value_enum, default_value = "tests")]
    pub family: Family,
    /// Fail on duplicate links instead of ignoring them.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NetworkChoice {
    /// Full co-occurrence-weighted projection.
    Full,
    /// One-tail validated network (community cores).
    Svn,
}

#[derive(Debug, Args, Serialize)]
pub struct CommunitiesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, ignore_case = true, default_value = "A")]
    pub side: Side,
    #[arg(long, value_enum, default_value = "svn")]
    pub network: NetworkChoice,
    #[arg(long, default_value = "0.01", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "fdr")]
    pub method: Method,
    /// Edge weights used on validated networks.
    #[arg(long, value_enum, default_value = "binary")]
    pub weights: EdgeWeights,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Partition file `node<TAB>community` scored as the candidate.
    #[arg(long)]
    pub candidate: PathBuf,
    /// Reference partition file.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long = "a-per-block", default_value_t = 50)]
    pub a_per_block: usize,
    #[arg(long = "b-per-block", default_value_t = 100)]
    pub b_per_block: usize,
    #[arg(long, default_value = "0.3", value_parser = parse_probability)]
    pub intra: f64,
    #[arg(long, default_value = "0.02", value_parser = parse_probability)]
    pub inter: f64,
    /// Rewire this fraction of links after generation.
    #[arg(long, value_parser = parse_probability)]
    pub rewire: Option<f64>,
    #[arg(long, value_enum, default_value = "matched")]
    pub swap: SwapMode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// Bipartite edge list to perturb.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, ignore_case = true, default_value = "A")]
    pub side: Side,
    /// Comma-separated rewiring fractions.
    #[arg(long = "pr", value_delimiter = ',', default_value = "0.05,0.1,0.15,0.2,0.25,0.3", value_parser = parse_probability)]
    pub p_r: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub realizations: usize,
    #[arg(long, default_value = "0.01", value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "matched")]
    pub swap: SwapMode,
    #[arg(long, value_enum, default_value = "binary")]
    pub weights: EdgeWeights,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => EXIT_RUNTIME,
                _ => EXIT_USAGE,
            }
        }
    }
}

struct Progress {
    quiet: bool,
}

impl Progress {
    fn say(&self, message: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", message.as_ref());
        }
    }
}

fn parameters<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn execute(cli: &Cli) -> Result<()> {
    let progress = Progress { quiet: cli.quiet };
    match &cli.command {
        Command::Backbone(args) => cmd_backbone(args, &progress),
        Command::Validate(args) => cmd_validate(args, &progress),
        Command::Communities(args) => cmd_communities(args, &progress),
        Command::Compare(args) => cmd_compare(args),
        Command::Benchmark(args) => cmd_benchmark(args, &progress),
        Command::Experiment(args) => cmd_experiment(args, &progress),
    }
}

fn cmd_backbone(args: &BackboneArgs, progress: &Progress) -> Result<()> {
    let wn = load_weighted(&args.input, args.directed)?;
    progress.say(format!(
        "loaded {} nodes, {} edges",
        wn.node_count(),
        wn.edge_count()
    ));
    let bb = disparity_backbone(&wn, args.alpha, args.correction, args.degree_one)?;
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("backbone", parameters(args), None);
    manifest.add_input(&args.input)?;

    write_file(&args.out.join("backbone.tsv"), |out| {
        write_backbone_tsv(&bb.edges, wn.nodes(), out)
    })?;
    save_node_index(wn.nodes(), args.out.join("nodes.tsv"))?;
    manifest.outputs = vec!["backbone.tsv".into(), "nodes.tsv".into()];
    let mut symmetric_edges = None;
    if let Some(mode) = args.symmetrize {
        let sym = bb.symmetrize(mode);
        write_file(&args.out.join("backbone_symmetric.tsv"), |out| {
            write_backbone_tsv(&sym, wn.nodes(), out)
        })?;
        manifest.outputs.push("backbone_symmetric.tsv".into());
        symmetric_edges = Some(sym.len());
    }
    manifest.details = json!({
        "nodes": wn.node_count(),
        "edges": wn.edge_count(),
        "n_tests": bb.n_tests,
        "threshold": bb.threshold,
        "retained_edges": bb.edges.len(),
        "symmetric_edges": symmetric_edges,
    });
    manifest.write(&args.out)?;
    progress.say(format!("retained {} directed edges", bb.edges.len()));
    Ok(())
}

fn cmd_validate(args: &ValidateArgs, progress: &Progress) -> Result<()> {
    let bn = load_bipartite(&args.input, args.strict)?;
    progress.say(format!(
        "loaded {} A-nodes, {} B-nodes, {} links",
        bn.size(Side::A),
        bn.size(Side::B),
        bn.link_count()
    ));
    let vn = match args.tails {
        Tails::One => validate_one_tail(&bn, args.side, args.alpha, args.method)?,
        Tails::Two => validate_two_tail(&bn, args.side, args.alpha, args.method, args.family)?,
    };
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("validate", parameters(args), None);
    manifest.add_input(&args.input)?;
    let nodes = bn.nodes(args.side);
    write_file(&args.out.join("validated.tsv"), |out| vn.write_tsv(nodes, out))?;
    save_node_index(nodes, args.out.join("nodes.tsv"))?;
    manifest.outputs = vec!["validated.tsv".into(), "nodes.tsv".into()];
    manifest.details = json!({
        "side": args.side,
        "population": bn.size(args.side.opposite()),
        "n_tests": vn.n_tests,
        "threshold": vn.threshold,
        "validated_edges": vn.edges.len(),
        "isolated_nodes_excluded": vn.isolated_nodes,
    });
    manifest.write(&args.out)?;
    progress.say(format!(
        "{} of {} tests validated",
        vn.edges.len(),
        vn.n_tests
    ));
    Ok(())
}

fn cmd_communities(args: &CommunitiesArgs, progress: &Progress) -> Result<()> {
    let bn = load_bipartite(&args.input, args.strict)?;
    let (graph, partition, validated) = match args.network {
        NetworkChoice::Full => {
            let pn = project(&bn, args.side);
            let part = louvain_projection(&pn, args.seed)?;
            (CommunityGraph::from_projection(&pn), part, None)
        }
        NetworkChoice::Svn => {
            let vn = validate_one_tail(&bn, args.side, args.alpha, args.method)?;
            let part = cores_of(&vn, args.seed, args.weights)?;
            let edges = vn.edges.len();
            (CommunityGraph::from_validated(&vn, args.weights), part, Some(edges))
        }
    };
    let q = if partition.is_empty() {
        None
    } else {
        Some(modularity(&graph, &partition)?)
    };
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("communities", parameters(args), Some(args.seed));
    manifest.add_input(&args.input)?;
    let nodes = bn.nodes(args.side);
    write_file(&args.out.join("partition.tsv"), |out| {
        partition.write_tsv(nodes, out)
    })?;
    save_node_index(nodes, args.out.join("nodes.tsv"))?;
    let metrics = json!({
        "modularity": q,
        "communities": partition.n_communities(),
        "covered_nodes": partition.coverage().len(),
        "side_nodes": nodes.len(),
        "validated_edges": validated,
    });
    write_json(&args.out.join("metrics.json"), &metrics)?;
    manifest.outputs = vec!["partition.tsv".into(), "nodes.tsv".into(), "metrics.json".into()];
    manifest.details = metrics;
    manifest.write(&args.out)?;
    progress.say(format!(
        "{} communities over {} nodes",
        partition.n_communities(),
        partition.coverage().len()
    ));
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    write_file(path, |out| {
        serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::other)?;
        std::io::Write::write_all(out, b"\n")
    })
}

fn read_partition_file(path: &Path) -> Result<Vec<(String, String)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_partition_tsv(std::io::BufReader::new(file))
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let candidate = read_partition_file(&args.candidate)?;
    let reference = read_partition_file(&args.reference)?;
    let (_, cand, refp) = align_partitions(&candidate, &reference);
    let r_adj = adjusted_rand(&cand, &refp)?;
    let w_adj = match adjusted_wallace(&cand, &refp) {
        Ok(v) => Some(v),
        Err(Error::UndefinedWallace(reason)) => {
            log::warn!("adjusted Wallace index undefined: {reason}");
            None
        }
        Err(e) => return Err(e),
    };
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("compare", parameters(args), None);
    manifest.add_input(&args.candidate)?;
    manifest.add_input(&args.reference)?;
    let metrics = json!({ "r_adj": r_adj, "w_adj": w_adj });
    write_json(&args.out.join("metrics.json"), &metrics)?;
    manifest.outputs = vec!["metrics.json".into()];
    manifest.details = metrics;
    manifest.write(&args.out)
}

fn cmd_benchmark(args: &BenchmarkArgs, progress: &Progress) -> Result<()> {
    let spec = BenchmarkSpec {
        n_blocks: args.blocks,
        a_nodes_per_block: args.a_per_block,
        b_nodes_per_block: args.b_per_block,
        intra_link_prob: args.intra,
        inter_link_prob: args.inter,
        seed: args.seed,
    };
    let (mut bn, planted) = benchmark::generate(&spec)?;
    let mut rewire_stats = None;
    if let Some(p_r) = args.rewire {
        let plan = RewirePlan {
            mode: args.swap,
            ..RewirePlan::new(p_r, crate::experiment::derive_seed(args.seed, 1))
        };
        let (rewired, stats) = benchmark::rewire(&bn, &plan)?;
        bn = rewired;
        rewire_stats = Some(stats);
    }
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("benchmark", parameters(args), Some(args.seed));
    graph::save_bipartite(&bn, args.out.join("bipartite.tsv"))?;
    write_file(&args.out.join("planted.tsv"), |out| {
        planted.write_tsv(bn.nodes(Side::A), out)
    })?;
    manifest.outputs = vec!["bipartite.tsv".into(), "planted.tsv".into()];
    manifest.details = json!({
        "a_nodes": bn.size(Side::A),
        "b_nodes": bn.size(Side::B),
        "links": bn.link_count(),
        "rewire": rewire_stats,
    });
    manifest.write(&args.out)?;
    progress.say(format!("generated {} links", bn.link_count()));
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs, progress: &Progress) -> Result<()> {
    let bn = load_bipartite(&args.input, args.strict)?;
    let config = ExperimentConfig {
        side: args.side,
        p_r_values: args.p_r.clone(),
        realizations: args.realizations,
        alpha: args.alpha,
        seed: args.seed,
        swap_mode: args.swap,
        weights: args.weights,
    };
    progress.say(format!(
        "running {} realizations at {} noise levels",
        args.realizations,
        args.p_r.len()
    ));
    let report = robustness_experiment(&bn, &config)?;
    prepare_out(&args.out)?;
    let mut manifest = RunManifest::new("experiment", parameters(args), Some(args.seed));
    manifest.add_input(&args.input)?;
    write_file(&args.out.join("experiment.tsv"), |out| report.write_tsv(out))?;
    manifest.outputs = vec!["experiment.tsv".into()];
    manifest.details = json!({
        "reference_seed": report.reference_seed,
        "reference_communities": report.reference_communities,
        "p_r_semantics": "round(p_r * links / 2) double-edge swaps per realization",
        "defined_realizations": report
            .rows
            .iter()
            .map(|r| json!({
                "network_kind": r.kind,
                "p_r": r.p_r,
                "metric": r.metric,
                "defined": r.defined,
            }))
            .collect::<Vec<_>>(),
    });
    manifest.write(&args.out)?;
    progress.say("done");
    Ok(())
}
