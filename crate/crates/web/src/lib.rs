//! Browser bindings: compile a task, generate a map, run an episode.
//!
//! The plain functions return JSON strings and are usable natively; the
//! `#[wasm_bindgen]` wrappers turn their errors into JavaScript exceptions.

use serde_json::json;
use tlfe::baseline::run_baseline;
use tlfe::bench::Method;
use tlfe::commit::commit_states;
use tlfe::env::{load_map, MapGenConfig};
use tlfe::planner::{run_episode, PlannerConfig};
use tlfe::scltl::{compile_dfa, parse_formula, ObservationSet};
use wasm_bindgen::prelude::*;

/// Compiles `formula` over the comma-separated `alphabet` and reports the automaton with
/// its commit states.
pub fn compile_json(formula: &str, alphabet: &str) -> Result<String, String> {
    let set = ObservationSet::parse_list(alphabet).map_err(|e| e.to_string())?;
    let phi = parse_formula(formula, &set).map_err(|e| e.to_string())?;
    let dfa = compile_dfa(&phi, &set).map_err(|e| e.to_string())?;
    let commits = commit_states(&dfa);
    Ok(json!({
        "formula": phi.display(&set).to_string(),
        "dfa": dfa.to_json(),
        "commits": commits.to_json(&dfa),
    })
    .to_string())
}

/// A random map in the text map format.
pub fn generate_text(size: usize, n_blocks: usize, seed: u64) -> Result<String, String> {
    let map = MapGenConfig::new(size, n_blocks).generate(seed).map_err(|e| e.to_string())?;
    Ok(map.to_text())
}

/// Runs the rescue task on `map_text` with `method` (`ours` or `baseline`) and returns
/// per-cell labels and region flags (row-major) together with the episode.
pub fn explore_json(map_text: &str, method: &str, h: usize) -> Result<String, String> {
    let map = load_map(map_text).map_err(|e| e.to_string())?;
    let method: Method = method.parse()?;
    let set = ObservationSet::new(tlfe::RESCUE_ALPHABET).map_err(|e| e.to_string())?;
    let phi = parse_formula(tlfe::RESCUE_TASK, &set).map_err(|e| e.to_string())?;
    let dfa = compile_dfa(&phi, &set).map_err(|e| e.to_string())?;
    let cfg = PlannerConfig { h, ..PlannerConfig::default() };
    let res = match method {
        Method::Ours => run_episode(&map, &dfa, &commit_states(&dfa), &cfg),
        Method::Baseline => run_baseline(&map, &dfa, &cfg),
    }
    .map_err(|e| e.to_string())?;
    let labels: Vec<Option<&str>> = map.cells().map(|c| map.label_name(c)).collect();
    let one_way: Vec<bool> = map.cells().map(|c| map.is_one_way(c)).collect();
    Ok(json!({
        "width": map.width(),
        "height": map.height(),
        "labels": labels,
        "one_way": one_way,
        "episode": res.to_json(&dfa),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn compile(formula: &str, alphabet: &str) -> Result<String, JsError> {
    compile_json(formula, alphabet).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn generate(size: usize, n_blocks: usize, seed: u32) -> Result<String, JsError> {
    generate_text(size, n_blocks, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn explore(map_text: &str, method: &str, h: usize) -> Result<String, JsError> {
    explore_json(map_text, method, h).map_err(|e| JsError::new(&e))
}
