//! Command-line surface. Every command writes a [`RunManifest`].

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use s3gnd_core::gnd::brute_force_s3gnd_with_cap;
use s3gnd_core::hypergraph::{default_base_count, sample_pairs, PairDataset};
use s3gnd_core::query::dedupe_by_vertex_set;
use s3gnd_core::workload::{defaults, gen_queries, gen_synthetic, KeywordDistribution, QueryGenConfig, SynthConfig};
use s3gnd_core::{
    Aggregate, BuildConfig, EmbeddingTable, Graph, KeywordHypergraph, PruneConfig, QueryEngine, QueryParams,
    TreeIndex, VertexId,
};
use serde::Serialize;

use crate::bench::{records_jsonl, run_bench, run_workload, summary_table, BenchConfig, SweepParam};
use crate::convert::convert_edge_list;
use crate::error::Error;
use crate::formats::answers::{format_answers, format_stats};
use crate::formats::embeddings::{read_embeddings, write_embeddings};
use crate::formats::graph::{read_graph, read_query, write_graph};
use crate::formats::index::{load_index, save_index};
use crate::formats::trainer::{write_trainer_input, TrainerInput};
use crate::manifest::{default_manifest_path, RunManifest};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_FINGERPRINT: u8 = 4;
pub const EXIT_ORACLE_MISMATCH: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "s3gnd", version, about = "Keyword-aware subgraph matching under a neighbor-difference threshold")]
pub struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the run manifest (default: next to the output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a small-world synthetic data graph.
    GenGraph(GenGraphArgs),
    /// Extract random-walk queries from a data graph.
    GenQueries(GenQueriesArgs),
    /// Convert an edge list plus labels file into the graph format.
    Convert(ConvertArgs),
    /// Write the keyword hypergraph and sampled pairs for the trainer.
    ExportHypergraph(ExportArgs),
    /// Write seeded fallback embeddings for a graph's keywords.
    EmbedFallback(EmbedArgs),
    /// Build and save the tree index.
    Build(BuildArgs),
    /// Answer queries against a built index.
    Query(QueryArgs),
    /// Run synthetic sweeps and pruning ablations.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Agg {
    Max,
    Sum,
}

impl From<Agg> for Aggregate {
    fn from(a: Agg) -> Self {
        match a {
            Agg::Max => Aggregate::Max,
            Agg::Sum => Aggregate::Sum,
        }
    }
}

impl Agg {
    fn default_delta(self) -> f64 {
        match self {
            Agg::Max => defaults::DELTA_MAX,
            Agg::Sum => defaults::DELTA_SUM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    Uniform,
    Gaussian,
    Zipf,
}

impl From<Dist> for KeywordDistribution {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Uniform => KeywordDistribution::Uniform,
            Dist::Gaussian => KeywordDistribution::Gaussian,
            Dist::Zipf => KeywordDistribution::Zipf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PruneRule {
    Mbr,
    Nd,
    Gnd,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = defaults::GRAPH_SIZE)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub ring_k: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_shortcut: f64,
    #[arg(long, default_value_t = defaults::SIGMA)]
    pub sigma: usize,
    #[arg(long, default_value_t = defaults::KEYWORDS_PER_VERTEX)]
    pub kw_per_vertex: usize,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    pub dist: Dist,
    #[arg(long, default_value_t = 1)]
    pub wmin: u32,
    #[arg(long, default_value_t = 5)]
    pub wmax: u32,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            n: self.n,
            ring_k: self.ring_k,
            p_shortcut: self.p_shortcut,
            sigma_size: self.sigma,
            kw_per_vertex: self.kw_per_vertex,
            kw_dist: self.dist.into(),
            weight_range: (self.wmin, self.wmax),
            seed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenGraphArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenQueriesArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = defaults::QUERY_SIZE)]
    pub qsize: usize,
    #[arg(long, default_value_t = defaults::QUERIES)]
    pub count: usize,
    #[arg(long, default_value_t = 0.9)]
    pub kw_rate: f64,
    #[arg(long, default_value_t = 0.7)]
    pub edge_rate: f64,
    /// Directory receiving `q0000.txt`, `q0001.txt`, ...
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvertArgs {
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Pairs per category are twice this; defaults to the number of
    /// containment pairs, capped at 10000.
    #[arg(long)]
    pub base_count: Option<usize>,
    /// Embedding dimension the trainer should produce.
    #[arg(long, default_value_t = defaults::DIM)]
    pub dim: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = defaults::DIM)]
    pub dim: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Embedding file, or `fallback` for seeded hash embeddings.
    #[arg(long, default_value = "fallback")]
    pub embeddings: String,
    /// Dimension of fallback embeddings.
    #[arg(long, default_value_t = defaults::DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = defaults::FANOUT)]
    pub fanout: usize,
    #[arg(long, default_value_t = 3)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QueryArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
    /// Embedding file, or `fallback` (uses --dim and --seed).
    #[arg(long, default_value = "fallback")]
    pub embeddings: String,
    #[arg(long, default_value_t = defaults::DIM)]
    pub dim: usize,
    /// Query graph file; repeat for a workload.
    #[arg(long, required = true)]
    pub query: Vec<PathBuf>,
    /// Threshold; defaults to 1 for max and 3 for sum.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Agg::Max)]
    pub agg: Agg,
    /// Keep only the lowest-GND mapping per data vertex set.
    #[arg(long)]
    pub dedupe: bool,
    /// Also run the brute-force oracle and compare answer sets.
    #[arg(long)]
    pub oracle_check: bool,
    #[arg(long, default_value_t = s3gnd_core::gnd::DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub disable_prune: Vec<PruneRule>,
    /// Concurrent queries (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Answer file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = defaults::QUERY_SIZE)]
    pub qsize: usize,
    #[arg(long, default_value_t = defaults::QUERIES)]
    pub queries: usize,
    #[arg(long, value_enum, default_value_t = Agg::Max)]
    pub agg: Agg,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = defaults::DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = defaults::FANOUT)]
    pub fanout: usize,
    #[arg(long, default_value_t = 3)]
    pub max_iter: usize,
    /// Parameter to sweep: delta, kw, sigma, qsize or n.
    #[arg(long, requires = "values")]
    pub sweep: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Compare the three pruning combinations.
    #[arg(long)]
    pub ablation: bool,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// JSON-lines file with one record per (configuration, query).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status for an error returned by [`run`].
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Io { .. } => EXIT_FAILURE,
                Error::OracleMismatch(_) => EXIT_ORACLE_MISMATCH,
                e if e.is_fingerprint_mismatch() => EXIT_FINGERPRINT,
                _ => EXIT_VALIDATION,
            };
        }
        if let Some(err) = cause.downcast_ref::<s3gnd_core::Error>() {
            return match err {
                s3gnd_core::Error::FingerprintMismatch(_) => EXIT_FINGERPRINT,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_FAILURE
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    let manifest_at = |cmd: &str, out: Option<&Path>| cli.manifest.clone().unwrap_or_else(|| default_manifest_path(cmd, out));
    match &cli.command {
        Command::GenGraph(a) => {
            let mut m = RunManifest::new("gen-graph", a, seed);
            let start = Instant::now();
            let g = gen_synthetic(&a.synth.config(seed))?;
            write_graph(&a.out, &g)?;
            m.timing("total", start.elapsed()).output(&a.out).input("graph_out", g.fingerprint());
            eprintln!("wrote {} vertices, {} edges to {}", g.vertex_count(), g.edge_count(), a.out.display());
            m.write(&manifest_at("gen-graph", Some(&a.out)))?;
        }
        Command::GenQueries(a) => {
            let mut m = RunManifest::new("gen-queries", a, seed);
            let g = read_graph(&a.graph)?;
            m.input("graph", g.fingerprint());
            let cfg = QueryGenConfig { qsize: a.qsize, kw_sample_rate: a.kw_rate, edge_sample_rate: a.edge_rate, seed };
            let qs = gen_queries(&g, &cfg, a.count)?;
            fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
            for (i, q) in qs.iter().enumerate() {
                let path = a.out_dir.join(format!("q{i:04}.txt"));
                write_graph(&path, q)?;
                m.output(path);
            }
            eprintln!("wrote {} queries to {}", qs.len(), a.out_dir.display());
            m.write(&manifest_at("gen-queries", Some(&a.out_dir.join("queries"))))?;
        }
        Command::Convert(a) => {
            let mut m = RunManifest::new("convert", a, seed);
            let edges = fs::read_to_string(&a.edges).map_err(|e| Error::io(&a.edges, e))?;
            let labels = match &a.labels {
                Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
                None => None,
            };
            let (g, report) = convert_edge_list(&edges, labels.as_deref())?;
            write_graph(&a.out, &g)?;
            if report.self_loops > 0 || report.repeated_edges > 0 {
                eprintln!(
                    "warning: dropped {} self-loops and {} repeated edges",
                    report.self_loops, report.repeated_edges
                );
            }
            m.output(&a.out).input("graph_out", g.fingerprint());
            m.write(&manifest_at("convert", Some(&a.out)))?;
        }
        Command::ExportHypergraph(a) => {
            let mut m = RunManifest::new("export-hypergraph", a, seed);
            let g = read_graph(&a.graph)?;
            m.input("graph", g.fingerprint());
            let h = KeywordHypergraph::build(&g);
            let pairs = if h.hyperedges().len() < 2 {
                eprintln!(
                    "warning: hypergraph has {} hyperedges; no pairs sampled",
                    h.hyperedges().len()
                );
                PairDataset { seed, ..Default::default() }
            } else {
                let base = a.base_count.unwrap_or_else(|| default_base_count(&h));
                let (pairs, shortfalls) = sample_pairs(&h, base, seed)?;
                for s in shortfalls {
                    eprintln!("warning: {s}");
                }
                pairs
            };
            write_trainer_input(&a.out, &TrainerInput { hypergraph: h, pairs, dim: a.dim })?;
            m.output(&a.out);
            m.write(&manifest_at("export-hypergraph", Some(&a.out)))?;
        }
        Command::EmbedFallback(a) => {
            let mut m = RunManifest::new("embed-fallback", a, seed);
            let g = read_graph(&a.graph)?;
            let t = EmbeddingTable::fallback(g.keyword_domain(), a.dim, seed)?;
            write_embeddings(&a.out, &t)?;
            m.input("graph", g.fingerprint()).input("embeddings_out", t.fingerprint()).output(&a.out);
            m.write(&manifest_at("embed-fallback", Some(&a.out)))?;
        }
        Command::Build(a) => {
            let mut m = RunManifest::new("build", a, seed);
            let start = Instant::now();
            let g = read_graph(&a.graph)?;
            let t = load_table(&a.embeddings, &g, a.dim, seed)?;
            m.timing("load", start.elapsed());
            let build = Instant::now();
            let cfg = BuildConfig { fanout: a.fanout, max_iter: a.max_iter, seed };
            let ix = TreeIndex::build(&g, &t, &cfg)?;
            m.timing("build", build.elapsed());
            save_index(&a.out, &ix)?;
            m.timing("total", start.elapsed())
                .input("graph", g.fingerprint())
                .input("embeddings", t.fingerprint())
                .output(&a.out);
            println!(
                "built index: vertices={} height={} fanout={} dim={} build_ms={:.1}",
                ix.vertex_count(),
                ix.height(),
                ix.fanout,
                ix.dim,
                build.elapsed().as_secs_f64() * 1e3
            );
            m.write(&manifest_at("build", Some(&a.out)))?;
        }
        Command::Query(a) => {
            let mut m = RunManifest::new("query", a, seed);
            let out = cmd_query(a, seed, &mut m);
            m.write(&manifest_at("query", a.out.as_deref()))?;
            out?;
        }
        Command::Bench(a) => {
            let mut m = RunManifest::new("bench", a, seed);
            let sweep = match &a.sweep {
                Some(s) => Some((s.parse::<SweepParam>().map_err(anyhow::Error::msg)?, a.values.clone())),
                None => None,
            };
            let cfg = BenchConfig {
                synth: a.synth.config(seed),
                query: QueryGenConfig { qsize: a.qsize, seed, ..Default::default() },
                queries: a.queries,
                aggregate: a.agg.into(),
                delta: a.delta.unwrap_or(a.agg.default_delta()),
                dim: a.dim,
                build: BuildConfig { fanout: a.fanout, max_iter: a.max_iter, seed },
                sweep,
                ablation: a.ablation,
                workers: a.workers,
            };
            let start = Instant::now();
            let records = run_bench(&cfg)?;
            m.timing("total", start.elapsed());
            print!("{}", summary_table(&records));
            if let Some(out) = &a.out {
                fs::write(out, records_jsonl(&records)).map_err(|e| Error::io(out, e))?;
                m.output(out);
            }
            m.write(&manifest_at("bench", a.out.as_deref()))?;
        }
    }
    Ok(())
}

fn load_table(source: &str, g: &Graph, dim: usize, seed: u64) -> anyhow::Result<EmbeddingTable> {
    if source == "fallback" {
        Ok(EmbeddingTable::fallback(g.keyword_domain(), dim, seed)?)
    } else {
        Ok(read_embeddings(source).with_context(|| format!("loading embeddings {source}"))?)
    }
}

fn cmd_query(a: &QueryArgs, seed: u64, m: &mut RunManifest) -> anyhow::Result<()> {
    let start = Instant::now();
    let g = read_graph(&a.graph)?;
    let t = load_table(&a.embeddings, &g, a.dim, seed)?;
    let ix = load_index(&a.index)?;
    m.input("graph", g.fingerprint()).input("embeddings", t.fingerprint());
    let engine = QueryEngine::new(&g, &ix, &t)?;
    let queries = a
        .query
        .iter()
        .map(|p| read_query(p).with_context(|| format!("loading query {}", p.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    for (p, q) in a.query.iter().zip(&queries) {
        m.input(&format!("query:{}", p.display()), q.fingerprint());
    }
    m.timing("load", start.elapsed());

    let p = QueryParams::new(a.delta.unwrap_or(a.agg.default_delta()), a.agg.into())?;
    let mut prune = PruneConfig::default();
    for rule in &a.disable_prune {
        let name = match rule {
            PruneRule::Mbr => "mbr",
            PruneRule::Nd => "nd",
            PruneRule::Gnd => "gnd",
        };
        prune.disable(name)?;
    }
    let run = Instant::now();
    let results = run_workload(&engine, &queries, &p, &prune, a.workers)?;
    m.timing("query", run.elapsed());

    let mut text = String::new();
    let mut mismatches = Vec::new();
    for ((path, q), (answers, stats)) in a.query.iter().zip(&queries).zip(results) {
        if a.query.len() > 1 {
            writeln!(text, "# query {}", path.display()).unwrap();
        }
        if a.oracle_check {
            let oracle = brute_force_s3gnd_with_cap(&g, q, &p, a.oracle_cap)?;
            let key = |xs: &[s3gnd_core::Answer]| -> BTreeSet<Vec<(VertexId, VertexId)>> {
                xs.iter().map(|x| x.mapping.iter().collect()).collect()
            };
            let ok = key(&oracle) == key(&answers);
            writeln!(text, "oracle {} answers={} oracle_answers={}", if ok { "MATCH" } else { "MISMATCH" }, answers.len(), oracle.len())
                .unwrap();
            if !ok {
                mismatches.push(path.display().to_string());
            }
        }
        let answers = if a.dedupe { dedupe_by_vertex_set(answers) } else { answers };
        let mut stats = stats;
        stats.answers = answers.len();
        text.push_str(&format_answers(&answers));
        text.push_str(&format_stats(&stats));
    }
    match &a.out {
        Some(out) => {
            fs::write(out, &text).map_err(|e| Error::io(out, e))?;
            m.output(out);
        }
        None => print!("{text}"),
    }
    m.timing("total", start.elapsed());
    if !mismatches.is_empty() {
        bail!(Error::OracleMismatch(mismatches.join(", ")));
    }
    Ok(())
}
