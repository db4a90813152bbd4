mod render;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use tlfe::bench::{format_table, run_bench, to_jsonl, BenchConfig, Method};
use tlfe::commit::commit_states;
use tlfe::env::{load_map, Cell, GridMap, KnownSet, MapGenConfig};
use tlfe::planner::{EpisodeResult, PlannerConfig, Verdict};
use tlfe::product::ProductGraph;
use tlfe::scltl::{compile_dfa, parse_formula, DfaJson, ObservationSet, TotalDfa};

use render::{render_trajectory, Format, Timeline};

#[derive(Parser)]
#[command(name = "tlfe", version, about = "Temporal-logic-aware frontier-based exploration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an scLTL formula to a total DFA in JSON.
    Compile {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List commit states with witness words.
    Commits {
        #[command(flatten)]
        task: TaskArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one exploration episode.
    Run {
        #[command(flatten)]
        world: WorldArgs,
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, default_value = "ours")]
        method: Method,
        /// Write the episode result as JSON instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-step trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write product graph sizes after every step as JSON lines.
        #[arg(long)]
        dump_product: Option<PathBuf>,
    },
    /// Run both methods over generated map suites.
    Bench {
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,5")]
        n_blocks: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        n_maps: usize,
        /// Base seed; map i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "ours,baseline")]
        methods: Vec<Method>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        alphabet: Option<String>,
        #[command(flatten)]
        plan: PlanArgs,
        /// Record wall-clock milliseconds per run (makes the output non-reproducible).
        #[arg(long)]
        timing: bool,
        /// Write records and the summary as JSON lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an episode as ASCII frames or an SVG document.
    Render {
        #[command(flatten)]
        world: WorldArgs,
        /// Episode result written by `run --out`; without it the episode is run here.
        #[arg(long)]
        result: Option<PathBuf>,
        #[command(flatten)]
        task: TaskArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, default_value = "ours")]
        method: Method,
        #[arg(long, default_value = "ascii")]
        format: Format,
        /// Steps to draw as ASCII frames; defaults to the last one.
        #[arg(long, value_delimiter = ',')]
        steps: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TaskArgs {
    /// scLTL formula without Next.
    #[arg(long, conflicts_with = "dfa")]
    formula: Option<String>,
    /// Comma-separated observation names.
    #[arg(long, conflicts_with = "dfa")]
    alphabet: Option<String>,
    /// DFA JSON written by `compile`.
    #[arg(long)]
    dfa: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha1: f64,
    #[arg(long, default_value_t = 20.0)]
    alpha2: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha3: f64,
    /// Sensing radius in hops.
    #[arg(long, default_value_t = 3)]
    h: usize,
    #[arg(long)]
    step_cap: Option<usize>,
}

impl PlanArgs {
    fn config(&self) -> PlannerConfig {
        PlannerConfig {
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            alpha3: self.alpha3,
            h: self.h,
            step_cap: self.step_cap,
        }
    }
}

#[derive(Args)]
struct WorldArgs {
    /// Map file in the text map format.
    #[arg(long, conflicts_with = "generate")]
    map: Option<PathBuf>,
    /// Generate a random map with this many lower-level blocks instead.
    #[arg(long)]
    generate: Option<usize>,
    #[arg(long, default_value_t = 20)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Failure = Box<dyn std::error::Error>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_world(world: &WorldArgs) -> Result<GridMap, Failure> {
    match (&world.map, world.generate) {
        (Some(path), _) => Ok(load_map(&read(path)?)?),
        (None, Some(n)) => Ok(MapGenConfig::new(world.size, n).generate(world.seed)?),
        (None, None) => Err("one of --map or --generate is required".into()),
    }
}

/// Resolves the task automaton. Without `--alphabet` the fallback alphabet is used;
/// without a formula or DFA the rescue task is.
fn load_task(task: &TaskArgs, fallback: Option<&ObservationSet>) -> Result<TotalDfa, Failure> {
    if let Some(path) = &task.dfa {
        let json: DfaJson = serde_json::from_str(&read(path)?)?;
        return Ok(TotalDfa::from_json(&json)?);
    }
    let (formula, default_alphabet) = match &task.formula {
        Some(f) => (f.as_str(), fallback.cloned()),
        None if fallback.is_some() => (tlfe::RESCUE_TASK, Some(ObservationSet::new(tlfe::RESCUE_ALPHABET)?)),
        None => return Err("one of --formula or --dfa is required".into()),
    };
    let alphabet = match &task.alphabet {
        Some(list) => ObservationSet::parse_list(list)?,
        None => default_alphabet.ok_or("--alphabet is required with --formula")?,
    };
    Ok(compile_dfa(&parse_formula(formula, &alphabet)?, &alphabet)?)
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn product_sizes(map: &GridMap, dfa: &TotalDfa, res: &EpisodeResult, h: usize) -> String {
    let mut known = KnownSet::empty(map);
    let mut graph = ProductGraph::new(map, dfa);
    let mut out = String::new();
    for (t, &cell) in res.trajectory.iter().enumerate() {
        known.sense(map, cell, h);
        graph.expand(map, &known, dfa);
        out.push_str(&json_line(&serde_json::json!({
            "t": t,
            "known": known.len(),
            "nodes": graph.len(),
            "edges": graph.edge_count(),
            "accepting": graph.accepting_nodes(dfa).count(),
            "trash": graph.trash_nodes(dfa).count(),
        })));
    }
    out
}

fn run_method(
    world: &WorldArgs,
    task: &TaskArgs,
    plan: &PlanArgs,
    method: Method,
) -> Result<(GridMap, TotalDfa, EpisodeResult), Failure> {
    let map = load_world(world)?;
    let dfa = load_task(task, Some(map.alphabet()))?;
    let commits = commit_states(&dfa);
    let res = method.run(&map, &dfa, &commits, &plan.config())?;
    log::info!("{}: {:?} after {} steps", method.name(), res.verdict, res.steps);
    Ok((map, dfa, res))
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Satisfied => ExitCode::SUCCESS,
        Verdict::Unsatisfiable => ExitCode::from(1),
    }
}

#[derive(Deserialize)]
struct StoredEpisode {
    trajectory: Vec<[usize; 2]>,
    reveal_step: Vec<Option<usize>>,
}

fn dispatch(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Compile { task, out } => {
            let dfa = load_task(&task, None)?;
            emit(out.as_deref(), &json_line(&dfa.to_json()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Commits { task, out } => {
            let dfa = load_task(&task, None)?;
            emit(out.as_deref(), &json_line(&commit_states(&dfa).to_json(&dfa)))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { world, task, plan, method, out, trace, dump_product } => {
            let (map, dfa, res) = run_method(&world, &task, &plan, method)?;
            if let Some(path) = trace {
                let lines: String = res.trace.iter().map(json_line).collect();
                emit(Some(&path), &lines)?;
            }
            if let Some(path) = dump_product {
                emit(Some(&path), &product_sizes(&map, &dfa, &res, plan.h))?;
            }
            emit(out.as_deref(), &json_line(&res.to_json(&dfa)))?;
            eprintln!("{}: {} after {} steps", method.name(), verdict_name(res.verdict), res.steps);
            Ok(verdict_code(res.verdict))
        }
        Command::Bench { size, n_blocks, n_maps, seed, methods, formula, alphabet, plan, timing, out } => {
            let mut cfg = BenchConfig {
                size,
                n_blocks,
                n_maps,
                base_seed: seed,
                methods,
                cfg: plan.config(),
                timing,
                ..BenchConfig::default()
            };
            if let Some(f) = formula {
                cfg.formula = f;
            }
            if let Some(a) = alphabet {
                cfg.alphabet = ObservationSet::parse_list(&a)?.names().to_vec();
            }
            let output = run_bench(&cfg)?;
            if let Some(path) = out {
                emit(Some(&path), &to_jsonl(&output))?;
            }
            emit(None, &format_table(&output.summary))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { world, result, task, plan, method, format, steps, out } => {
            let (map, trajectory, reveal) = match result {
                Some(path) => {
                    let map = load_world(&world)?;
                    let stored: StoredEpisode = serde_json::from_str(&read(&path)?)?;
                    let trajectory = stored.trajectory.iter().map(|&[c, r]| Cell::new(c, r)).collect();
                    (map, trajectory, stored.reveal_step)
                }
                None => {
                    let (map, _, res) = run_method(&world, &task, &plan, method)?;
                    (map, res.trajectory, res.reveal_step)
                }
            };
            let tl = Timeline { trajectory: &trajectory, reveal_step: &reveal };
            emit(out.as_deref(), &render_trajectory(&map, tl, format, &steps)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Satisfied => "satisfied",
        Verdict::Unsatisfiable => "task cannot be satisfied",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
