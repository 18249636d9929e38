//! Parameter sweeps and pruning ablations over synthetic corpora.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use s3gnd_core::workload::{gen_queries, gen_synthetic, QueryGenConfig, SynthConfig};
use s3gnd_core::{
    Aggregate, Answer, BuildConfig, EmbeddingTable, PruneConfig, QueryEngine, QueryGraph, QueryParams, QueryStats,
    TreeIndex,
};
use serde::Serialize;

use crate::error::{Error, Result};

/// Runs every query, `workers` at a time (0 = rayon default), keeping input
/// order. Each result carries its own wall time.
pub fn run_workload(
    engine: &QueryEngine<'_>,
    queries: &[QueryGraph],
    p: &QueryParams,
    prune: &PruneConfig,
    workers: usize,
) -> Result<Vec<(Vec<Answer>, QueryStats)>> {
    let run = |q: &QueryGraph| {
        let start = Instant::now();
        let (answers, mut stats) = engine.query(q, p, prune)?;
        stats.wall_time = Some(start.elapsed());
        Ok((answers, stats))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Core(s3gnd_core::Error::InvalidConfig(e.to_string())))?;
    pool.install(|| queries.par_iter().map(run).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Delta,
    KwPerVertex,
    Sigma,
    QuerySize,
    GraphSize,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::KwPerVertex => "kw",
            SweepParam::Sigma => "sigma",
            SweepParam::QuerySize => "qsize",
            SweepParam::GraphSize => "n",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "delta" => SweepParam::Delta,
            "kw" | "kw-per-vertex" => SweepParam::KwPerVertex,
            "sigma" => SweepParam::Sigma,
            "qsize" => SweepParam::QuerySize,
            "n" | "graph-size" => SweepParam::GraphSize,
            _ => return Err(format!("unknown sweep parameter {s:?} (delta, kw, sigma, qsize, n)")),
        })
    }
}

/// The three pruning combinations of the ablation study.
pub const ABLATION_MODES: [&str; 3] = ["mbr", "mbr+nd", "mbr+nd+gnd"];

pub fn ablation_prune(mode: &str) -> PruneConfig {
    PruneConfig {
        keyword_mbr: true,
        nd_bound: mode != "mbr",
        gnd_bound: mode == "mbr+nd+gnd",
        adjacent_extension: false,
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub synth: SynthConfig,
    pub query: QueryGenConfig,
    pub queries: usize,
    pub aggregate: Aggregate,
    pub delta: f64,
    pub dim: usize,
    pub build: BuildConfig,
    pub sweep: Option<(SweepParam, Vec<f64>)>,
    pub ablation: bool,
    pub workers: usize,
}

/// One line of machine-readable output per (configuration, query).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub param: String,
    pub value: f64,
    pub mode: String,
    pub query: usize,
    pub pruning_power: f64,
    pub candidates: usize,
    pub refined_mappings: u64,
    pub answers: usize,
    pub wall_ms: f64,
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let (param, values) = match &cfg.sweep {
        Some((p, v)) => (Some(*p), v.clone()),
        None => (None, vec![f64::NAN]),
    };
    let modes: Vec<&str> = if cfg.ablation { ABLATION_MODES.to_vec() } else { vec!["all"] };
    let mut records = Vec::new();
    let mut cached: Option<(SynthConfig, s3gnd_core::Graph, EmbeddingTable, TreeIndex)> = None;

    for value in values {
        let (mut synth, mut qcfg, mut delta) = (cfg.synth.clone(), cfg.query.clone(), cfg.delta);
        match param {
            Some(SweepParam::Delta) => delta = value,
            Some(SweepParam::KwPerVertex) => synth.kw_per_vertex = value as usize,
            Some(SweepParam::Sigma) => synth.sigma_size = value as usize,
            Some(SweepParam::QuerySize) => qcfg.qsize = value as usize,
            Some(SweepParam::GraphSize) => synth.n = value as usize,
            None => {}
        }
        if cached.as_ref().is_none_or(|c| c.0 != synth) {
            let g = gen_synthetic(&synth)?;
            let t = EmbeddingTable::fallback(g.keyword_domain(), cfg.dim, cfg.build.seed)?;
            let ix = TreeIndex::build(&g, &t, &cfg.build)?;
            cached = Some((synth, g, t, ix));
        }
        let (_, g, t, ix) = cached.as_ref().unwrap();
        let engine = QueryEngine::new(g, ix, t)?;
        let queries = if cfg.queries == 0 { Vec::new() } else { gen_queries(g, &qcfg, cfg.queries)? };
        let p = QueryParams::new(delta, cfg.aggregate)?;
        for mode in &modes {
            let prune = if *mode == "all" { PruneConfig::default() } else { ablation_prune(mode) };
            for (i, (_, s)) in run_workload(&engine, &queries, &p, &prune, cfg.workers)?.into_iter().enumerate() {
                records.push(BenchRecord {
                    param: param.map_or("none", SweepParam::name).to_string(),
                    value,
                    mode: mode.to_string(),
                    query: i,
                    pruning_power: s.pruning_power,
                    candidates: s.candidates_total,
                    refined_mappings: s.refined_mappings,
                    answers: s.answers,
                    wall_ms: s.wall_time.unwrap_or_default().as_secs_f64() * 1e3,
                });
            }
        }
    }
    Ok(records)
}

/// Mean pruning power, candidates, refined mappings and wall time per
/// (value, mode), in first-seen order.
pub fn summary_table(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<12} {:>10} {:<12} {:>7} {:>13} {:>12} {:>12} {:>10}",
        "param", "value", "mode", "queries", "pruning_power", "candidates", "refined", "wall_ms"
    )
    .unwrap();
    if records.is_empty() {
        writeln!(out, "(no queries)").unwrap();
        return out;
    }
    let mut groups: Vec<(&str, f64, &str, Vec<&BenchRecord>)> = Vec::new();
    for r in records {
        let same = |g: &&mut (&str, f64, &str, Vec<&BenchRecord>)| {
            g.0 == r.param && g.2 == r.mode && (g.1 == r.value || (g.1.is_nan() && r.value.is_nan()))
        };
        match groups.iter_mut().find(|g| same(g)) {
            Some(g) => g.3.push(r),
            None => groups.push((&r.param, r.value, &r.mode, vec![r])),
        }
    }
    for (param, value, mode, rs) in groups {
        let n = rs.len() as f64;
        let mean = |f: &dyn Fn(&BenchRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
        writeln!(
            out,
            "{:<12} {:>10} {:<12} {:>7} {:>13.6} {:>12.1} {:>12.1} {:>10.3}",
            param,
            if value.is_nan() { "-".to_string() } else { value.to_string() },
            mode,
            rs.len(),
            mean(&|r| r.pruning_power),
            mean(&|r| r.candidates as f64),
            mean(&|r| r.refined_mappings as f64),
            mean(&|r| r.wall_ms),
        )
        .unwrap();
    }
    out
}

pub fn records_jsonl(records: &[BenchRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}
