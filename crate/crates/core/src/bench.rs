//! Monte Carlo comparison of the two exploration methods over generated map suites.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::run_baseline;
use crate::commit::{commit_states, CommitReport};
use crate::env::{MapError, MapGenConfig};
use crate::planner::{run_episode, EpisodeResult, PlanError, PlannerConfig, Termination};
use crate::scltl::{compile_dfa, parse_formula, DfaError, FormulaError, ObservationSet, TotalDfa};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ours,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Baseline => "baseline",
        }
    }

    pub fn run(
        self,
        map: &crate::env::GridMap,
        dfa: &TotalDfa,
        commits: &CommitReport,
        cfg: &PlannerConfig,
    ) -> Result<EpisodeResult, PlanError> {
        match self {
            Method::Ours => run_episode(map, dfa, commits, cfg),
            Method::Baseline => run_baseline(map, dfa, cfg),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ours" => Ok(Method::Ours),
            "baseline" => Ok(Method::Baseline),
            other => Err(format!("unknown method `{other}` (expected `ours` or `baseline`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub size: usize,
    /// One suite per entry.
    pub n_blocks: Vec<usize>,
    pub n_maps: usize,
    pub base_seed: u64,
    pub formula: String,
    pub alphabet: Vec<String>,
    pub methods: Vec<Method>,
    pub cfg: PlannerConfig,
    /// Record wall-clock time per run. Off by default so result files are reproducible.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            size: 20,
            n_blocks: vec![0, 5],
            n_maps: 500,
            base_seed: 0,
            formula: crate::RESCUE_TASK.to_string(),
            alphabet: crate::RESCUE_ALPHABET.iter().map(|s| s.to_string()).collect(),
            methods: vec![Method::Ours, Method::Baseline],
            cfg: PlannerConfig::default(),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n_blocks: usize,
    pub map_index: usize,
    pub map_seed: u64,
    pub method: Method,
    pub satisfied: bool,
    pub steps: usize,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n_blocks: usize,
    pub method: Method,
    pub runs: usize,
    pub satisfied: usize,
    /// Percent, rounded to two decimals.
    pub satisfaction_rate: f64,
    /// Mean steps over all runs, deadlocked ones included, rounded to two decimals.
    pub avg_steps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchMeta {
    pub size: usize,
    pub n_maps: usize,
    pub base_seed: u64,
    pub formula: String,
    pub cfg: PlannerConfig,
    pub baseline: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub meta: BenchMeta,
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error("automaton: {0}")]
    Dfa(#[from] DfaError),
    #[error("map generation: {0}")]
    Map(#[from] MapError),
    #[error("{method:?} on map seed {seed}: {source}")]
    Plan { seed: u64, method: Method, source: PlanError },
    #[error("{method:?} on map seed {seed} reported success but its word is not accepted")]
    Verification { seed: u64, method: Method },
    #[error("no records to summarize")]
    Empty,
    #[error("invalid bench configuration: {0}")]
    Config(String),
}

const BASELINE_CONVENTIONS: &str = "nearest frontier by physical path weight, ties row-major; \
    a frontier is skipped if its shortest path violates the task; satisfying paths via product reachability";

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutput, BenchError> {
    if cfg.methods.is_empty() || cfg.n_maps == 0 || cfg.n_blocks.is_empty() {
        return Err(BenchError::Config("need at least one method, one map and one block count".into()));
    }
    cfg.cfg.validate().map_err(|e| BenchError::Config(e.to_string()))?;
    let alphabet = ObservationSet::new(cfg.alphabet.iter().map(String::as_str))?;
    let dfa = compile_dfa(&parse_formula(&cfg.formula, &alphabet)?, &alphabet)?;
    let commits = commit_states(&dfa);
    let mut methods = cfg.methods.clone();
    methods.sort_unstable();
    methods.dedup();

    let mut records = Vec::new();
    for &n_blocks in &cfg.n_blocks {
        let gen = MapGenConfig::new(cfg.size, n_blocks);
        for index in 0..cfg.n_maps {
            let seed = cfg.base_seed.wrapping_add(index as u64);
            let map = gen.generate(seed)?;
            for &method in &methods {
                let clock = Instant::now();
                let res = method.run(&map, &dfa, &commits, &cfg.cfg).map_err(|source| BenchError::Plan {
                    seed,
                    method,
                    source,
                })?;
                let wall_ms = cfg.timing.then(|| clock.elapsed().as_millis() as u64);
                if res.is_satisfied() && res.replay(&dfa) != (true, false) {
                    return Err(BenchError::Verification { seed, method });
                }
                log::debug!("n={n_blocks} seed={seed} {}: {:?} in {} steps", method.name(), res.verdict, res.steps);
                records.push(RunRecord {
                    n_blocks,
                    map_index: index,
                    map_seed: seed,
                    method,
                    satisfied: res.is_satisfied(),
                    steps: res.steps,
                    termination: res.termination,
                    wall_ms,
                });
            }
        }
    }
    let summary = summarize(&records)?;
    let meta = BenchMeta {
        size: cfg.size,
        n_maps: cfg.n_maps,
        base_seed: cfg.base_seed,
        formula: cfg.formula.clone(),
        cfg: cfg.cfg.clone(),
        baseline: BASELINE_CONVENTIONS,
    };
    Ok(BenchOutput { meta, records, summary })
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// One row per `(n_blocks, method)`, in ascending order.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::Empty);
    }
    let mut keys: Vec<(usize, Method)> = records.iter().map(|r| (r.n_blocks, r.method)).collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys
        .into_iter()
        .map(|(n_blocks, method)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.n_blocks == n_blocks && r.method == method).collect();
            let runs = group.len();
            let satisfied = group.iter().filter(|r| r.satisfied).count();
            let total: usize = group.iter().map(|r| r.steps).sum();
            SummaryRow {
                n_blocks,
                method,
                runs,
                satisfied,
                satisfaction_rate: round2(100.0 * satisfied as f64 / runs as f64),
                avg_steps: round2(total as f64 / runs as f64),
            }
        })
        .collect())
}

/// Plain-text table with one row per `(n_blocks, method)`.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>3}  {:<9} {:>5}  {:>12}  {:>10}", "n", "method", "runs", "satisfaction", "avg. steps");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>3}  {:<9} {:>5}  {:>11.2}%  {:>10.2}",
            r.n_blocks,
            r.method.name(),
            r.runs,
            r.satisfaction_rate,
            r.avg_steps
        );
    }
    out
}

/// JSON lines: one record per line, then a final `{"meta": .., "summary": ..}` object.
pub fn to_jsonl(output: &BenchOutput) -> String {
    let mut out = String::new();
    for r in &output.records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    let tail = serde_json::json!({ "meta": output.meta, "summary": output.summary });
    out.push_str(&tail.to_string());
    out.push('\n');
    out
}
